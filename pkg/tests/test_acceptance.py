"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py`` or directly with
``python3 tests/test_acceptance.py``.  The numerical suites take about two
minutes on one core; each suite is computed once and shared.
"""

import json
import subprocess
import sys

import pytest

from qpentagon import checks

CFG = checks.RunConfig()
REPORT_ARGV = [sys.executable, "-m", "qpentagon", "report", "--suites", "phi,cluster,qtorus,moduli", "--seed", "7"]
_cache = {}


def suite_records(name):
    if name not in _cache:
        _cache[name] = checks.run_suite(name, CFG)
    return _cache[name]


def criterion_records(cid):
    return [r for r in suite_records(checks.CRITERIA[cid]) if r.criterion_id == cid]


def determinism():
    runs = [subprocess.run(REPORT_ARGV, capture_output=True, timeout=600) for _ in range(2)]
    codes = [r.returncode for r in runs]
    same = runs[0].stdout == runs[1].stdout and bool(runs[0].stdout)
    return same and codes == [0, 0], {"identical_bytes": same, "exit_codes": codes}


def summary_line(cid, passed, measured):
    text = json.dumps(measured, sort_keys=True, separators=(",", ":"), default=str)
    if len(text) > 160:
        text = text[:157] + "..."
    return f"criterion {cid}: {'PASS' if passed else 'FAIL'} {text}"


def evaluate(cid):
    if cid == 12:
        return determinism()
    recs = criterion_records(cid)
    assert recs, f"no record for criterion {cid}"
    measured = recs[0].measured if len(recs) == 1 else [r.measured for r in recs]
    return all(r.passed for r in recs), measured


@pytest.mark.slow
@pytest.mark.parametrize("cid", range(1, 13))
def test_criterion(cid, capsys):
    passed, measured = evaluate(cid)
    with capsys.disabled():
        print("\n" + summary_line(cid, passed, measured))
    assert passed, summary_line(cid, passed, measured)


if __name__ == "__main__":
    results = [evaluate(cid) for cid in range(1, 13)]
    for cid, (passed, measured) in enumerate(results, 1):
        print(summary_line(cid, passed, measured))
    sys.exit(0 if all(p for p, _ in results) else 1)
