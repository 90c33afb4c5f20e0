"""On-disk cache of Grassmannian enumerations.

A cache file is one JSON header line followed by the packed RREF bases, one
byte per field element, ``k * n`` bytes per subspace, in enumeration order.
The header records ``format_version, n, k, q, modulus, count`` and a SHA-256
of the payload. A file whose header, count or digest does not validate is
rebuilt with a warning.
"""

from __future__ import annotations

import hashlib
import json
import os
import warnings
from pathlib import Path

import numpy as np

from .gfq import MODULI, make_field
from .grassmann import DEFAULT_CAP, GrassmannIndex, Subspace, enumerate_subspaces, is_rref
from .qarith import gauss_binom

CACHE_FORMAT_VERSION = 1
CACHE_ENV = "QEKR_CACHE_DIR"
MAGIC = "qekr-grassmannian"


class CacheWarning(UserWarning):
    pass


class CacheError(ValueError):
    pass


def cache_dir(path: str | Path | None = None) -> Path:
    if path is not None:
        return Path(path)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "qekr"


def cache_path(n: int, k: int, q: int, directory: str | Path | None = None) -> Path:
    return cache_dir(directory) / f"grassmannian-v{CACHE_FORMAT_VERSION}-n{n}-k{k}-q{q}.bin"


def _header(n: int, k: int, q: int, count: int, digest: str) -> dict:
    return {
        "magic": MAGIC,
        "format_version": CACHE_FORMAT_VERSION,
        "n": n,
        "k": k,
        "q": q,
        "modulus": list(MODULI.get(q, ())),
        "count": count,
        "sha256": digest,
    }


def encode(G: GrassmannIndex) -> bytes:
    payload = np.array([S.basis for S in G], dtype=np.uint8).reshape(len(G), G.k * G.n).tobytes()
    head = json.dumps(_header(G.n, G.k, G.q, len(G), hashlib.sha256(payload).hexdigest()), sort_keys=True)
    return head.encode("ascii") + b"\n" + payload


def read_header(data: bytes) -> tuple[dict, bytes]:
    line, sep, payload = data.partition(b"\n")
    if not sep:
        raise CacheError("missing header line")
    try:
        head = json.loads(line.decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CacheError(f"unreadable header: {exc}") from exc
    if not isinstance(head, dict) or head.get("magic") != MAGIC:
        raise CacheError("not a Grassmannian cache file")
    return head, payload


def decode(data: bytes, n: int, k: int, q: int) -> GrassmannIndex:
    """Parse and validate a cache file for ``(n, k, q)``."""
    head, payload = read_header(data)
    expected = _header(n, k, q, gauss_binom(n, k, q), hashlib.sha256(payload).hexdigest())
    for key in ("format_version", "n", "k", "q", "modulus", "count", "sha256"):
        if head.get(key) != expected[key]:
            raise CacheError(f"header field {key!r} is {head.get(key)!r}, expected {expected[key]!r}")
    count = expected["count"]
    if len(payload) != count * k * n:
        raise CacheError(f"payload has {len(payload)} bytes, expected {count * k * n}")
    F = make_field(q)
    rows = np.frombuffer(payload, dtype=np.uint8).reshape(count, k, n)
    if rows.size and rows.max() >= q:
        raise CacheError("entry outside the field")
    subs = []
    for B in rows.tolist():
        if not is_rref(B):
            raise CacheError("record is not in reduced row echelon form")
        basis = tuple(tuple(r) for r in B)
        pivots = tuple(next(c for c, x in enumerate(r) if x) for r in basis)
        subs.append(Subspace(n, basis, pivots, F))
    return GrassmannIndex(n, k, F, subs)


def build(n: int, k: int, q: int, directory: str | Path | None = None, cap: int = DEFAULT_CAP) -> Path:
    G = enumerate_subspaces(n, k, q, cap=cap)
    path = cache_path(n, k, q, directory)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_bytes(encode(G))
    tmp.replace(path)
    return path


def load(n: int, k: int, q: int, directory: str | Path | None = None, cap: int = DEFAULT_CAP) -> GrassmannIndex:
    """Cached enumeration, building it on a miss and rebuilding on corruption."""
    path = cache_path(n, k, q, directory)
    if path.exists():
        try:
            return decode(path.read_bytes(), n, k, q)
        except CacheError as exc:
            warnings.warn(f"{path}: {exc}; rebuilding", CacheWarning, stacklevel=2)
    build(n, k, q, directory, cap=cap)
    return decode(path.read_bytes(), n, k, q)


def inspect(path: str | Path) -> dict:
    head, payload = read_header(Path(path).read_bytes())
    head = dict(head)
    head["payload_bytes"] = len(payload)
    head["digest_ok"] = hashlib.sha256(payload).hexdigest() == head.get("sha256")
    head["current_version"] = head.get("format_version") == CACHE_FORMAT_VERSION
    return head


def entries(directory: str | Path | None = None) -> list[Path]:
    d = cache_dir(directory)
    return sorted(d.glob("grassmannian-v*-n*-k*-q*.bin")) if d.is_dir() else []


def clear(directory: str | Path | None = None) -> int:
    paths = entries(directory)
    for p in paths:
        p.unlink()
    return len(paths)
