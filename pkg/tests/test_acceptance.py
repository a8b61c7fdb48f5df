"""Acceptance suite: criteria 1-9 at full sample counts, then criterion 10.

Each test prints one ``[PASS]``/``[FAIL]`` line; run with ``pytest -s`` to see
them inline, or read the captured output in the verbose report.
"""

import json
import time

import pytest

from gnslab import acceptance, cli


@pytest.mark.parametrize("criterion", acceptance.CRITERIA, ids=lambda f: f.__name__.removeprefix("criterion_"))
def test_criterion(criterion, capsys):
    result = criterion(quick=False)
    with capsys.disabled():
        print("\n" + result.line())
    for check in result.checks:
        assert check.ok, f"criterion {result.number}: {check.label} value={check.value} bound={check.bound}"


def test_criterion_10_selftest(tmp_path, capsys):
    times, reports = [], []
    for name in ("a", "b"):
        t0 = time.perf_counter()
        code = cli.main(["selftest", "--quick", "--out", str(tmp_path / name)])
        times.append(time.perf_counter() - t0)
        assert code == cli.EXIT_OK
        reports.append((tmp_path / name / "selftest_report.json").read_bytes())
    capsys.readouterr()
    identical = reports[0] == reports[1]
    fast = max(times) <= 60.0
    report = json.loads(reports[0])
    ok = identical and fast and report["passed"] and len(report["criteria"]) == 9
    with capsys.disabled():
        status = "PASS" if ok else "FAIL"
        print(f"\n[{status}] criterion 10: quick self-test exit 0 in {max(times):.1f}s, "
              f"byte-identical reports: {identical}")
    assert identical
    assert fast
    assert report["passed"] and len(report["criteria"]) == 9


def test_selftest_sabotage_fails(tmp_path, capsys):
    code = cli.main(["selftest", "--quick", "--sabotage"])
    out = capsys.readouterr().out
    assert code == cli.EXIT_INVARIANT
    assert "[FAIL] criterion" in out


def test_full_selftest_timing_csv(tmp_path, monkeypatch, capsys):
    # full mode is exercised criterion by criterion above; here only the CSV plumbing
    fake = [acceptance.CriterionResult(n, f"c{n}", [acceptance.Check("x", 0.0, 1.0, True)]) for n in range(1, 10)]

    def run_all(quick, tol_scale, timings):
        timings.extend((r.number, 0.5) for r in fake)
        return fake

    monkeypatch.setattr(acceptance, "run_all", run_all)
    assert cli.main(["selftest", "--full", "--out", str(tmp_path)]) == cli.EXIT_OK
    lines = (tmp_path / "selftest_timings.csv").read_text().strip().splitlines()
    assert lines[0] == "criterion,seconds" and len(lines) == 10
    capsys.readouterr()
