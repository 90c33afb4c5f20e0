"""Structured verification results and their JSON form."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator

SCHEMA_VERSION = 1


def jsonable(value: Any) -> Any:
    """Convert exact values to JSON-safe ones without losing precision.

    Fractions become ``"p/q"`` strings (or plain ints when integral); ints
    beyond 2**53 become decimal strings so that no JSON reader rounds them.
    """
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return jsonable(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, int):
        return value if abs(value) < 2**53 else str(value)
    if isinstance(value, float):
        return value
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if hasattr(value, "item"):  # numpy scalar
        return jsonable(value.item())
    raise TypeError(f"cannot serialize {type(value).__name__}")


@dataclass
class Report:
    """Outcome of one check.

    ``passed`` is the verdict. ``residual_zero`` is set by identity checks
    (``None`` for pure inequality checks). ``witness`` names the first
    offending entry or coefficient when something fails.
    """

    check: str
    params: dict[str, Any]
    passed: bool = True
    residual_zero: bool | None = None
    witness: dict[str, Any] | None = None
    details: dict[str, Any] = field(default_factory=dict)
    status: str = "ok"
    notes: list[str] = field(default_factory=list)
    elapsed_ms: float | None = None

    def fail(self, witness: dict[str, Any] | None = None, status: str = "failed") -> None:
        self.passed = False
        self.status = status
        if witness is not None and self.witness is None:
            self.witness = witness

    def require(self, cond: bool, what: str, **witness: Any) -> bool:
        """Record ``what`` as failed (with witness) unless ``cond`` holds."""
        if not cond:
            self.fail({"failed": what, **witness})
        return cond

    def to_dict(self, timings: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "check": self.check,
            "params": jsonable(self.params),
            "passed": self.passed,
            "residual_zero": self.residual_zero,
            "status": self.status,
            "details": jsonable(self.details),
        }
        if self.witness is not None:
            out["witness"] = jsonable(self.witness)
        if self.notes:
            out["notes"] = list(self.notes)
        if timings and self.elapsed_ms is not None:
            out["elapsed_ms"] = round(self.elapsed_ms, 3)
        return out

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), sort_keys=True)

    def __bool__(self) -> bool:
        return self.passed


@contextmanager
def timed(report: Report) -> Iterator[Report]:
    start = time.perf_counter()
    try:
        yield report
    finally:
        report.elapsed_ms = (time.perf_counter() - start) * 1000.0


def dump_reports(reports: list[Report], timings: bool = False) -> str:
    """Serialize a batch of reports as one deterministic JSON document."""
    payload = {
        "schema_version": SCHEMA_VERSION,
        "passed": all(r.passed for r in reports),
        "reports": [r.to_dict(timings) for r in reports],
    }
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"
