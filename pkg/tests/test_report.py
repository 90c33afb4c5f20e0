import json
from fractions import Fraction

from qekr.report import SCHEMA_VERSION, Report, dump_reports, jsonable, timed


def test_jsonable():
    assert jsonable(Fraction(3, 4)) == "3/4"
    assert jsonable(Fraction(4, 2)) == 2
    assert jsonable(2**60) == str(2**60)
    assert jsonable({"a": (1, Fraction(1, 2))}) == {"a": [1, "1/2"]}


def test_report_fail_and_require():
    r = Report("x", {"n": 1})
    assert r.require(True, "fine")
    assert not r.require(1 == 2, "broken", value=3)
    assert not r and r.witness["failed"] == "broken" and r.witness["value"] == 3
    assert r.status == "failed"


def test_timings_only_on_request():
    r = Report("x", {})
    with timed(r):
        pass
    assert "elapsed_ms" not in r.to_dict()
    assert "elapsed_ms" in r.to_dict(timings=True)
    doc = json.loads(dump_reports([r]))
    assert doc["schema_version"] == SCHEMA_VERSION and doc["passed"]
