import csv
import io
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from lm05.cli import (
    COLLECTIVE_COLUMNS,
    COMPARE_COLUMNS,
    INDIVIDUAL_COLUMNS,
    MONTECARLO_COLUMNS,
    main,
)

GOLDEN = Path(__file__).parent / "golden"


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def _assert_csv_close(got, want, rtol=1e-10, atol=1e-12):
    assert len(got) == len(want)
    assert got[0] == want[0]
    for g, w in zip(got[1:], want[1:]):
        assert len(g) == len(w)
        for a, b in zip(g, w):
            try:
                fa, fb = float(a), float(b)
            except ValueError:
                assert a == b
            else:
                assert math.isclose(fa, fb, rel_tol=rtol, abs_tol=atol), (g, w)


def test_individual_tables(tmp_path, capsys):
    out = tmp_path / "ind.csv"
    code, _, err = _run(["individual", "--dims", "2,3", "--theta-count", "11", "--out", str(out)], capsys)
    assert code == 0
    rows = _rows(out.read_text())
    assert rows[0] == INDIVIDUAL_COLUMNS
    assert rows[1][:3] == ["2", "0", "0"] and rows[1][-1] == "1"
    thr = _rows((tmp_path / "ind_threshold.csv").read_text())
    assert thr[0] == ["d", "pdet_min_threshold"]
    assert float(thr[1][1]) < float(thr[2][1])
    assert "d=3" in err


def test_individual_stdout_has_both_tables(capsys):
    code, out, _ = _run(["individual", "--dims", "2", "--theta-count", "3"], capsys)
    assert code == 0
    first, second = out.strip().split("\n\n")
    assert first.startswith("d,theta") and second.startswith("d,pdet_min_threshold")


def test_collective_rows_sorted_and_finite(capsys):
    code, out, _ = _run(["collective", "--kind", "dep", "--dims", "5,3", "--p-count", "6"], capsys)
    assert code == 0
    rows = _rows(out)
    assert rows[0] == COLLECTIVE_COLUMNS
    body = rows[1:]
    assert [int(r[2]) for r in body] == [3] * 6 + [5] * 6
    assert all(math.isfinite(float(v)) for r in body for v in r[3:])
    assert float(body[0][-2]) == pytest.approx(math.log2(3))


def test_collective_correlated_qubit_has_zero_qk(capsys):
    code, out, _ = _run(["collective", "--kind", "dep", "--mode", "corr", "--dims", "2"], capsys)
    assert code == 0
    body = _rows(out)[1:]
    assert all(r[4] == "0" and r[6] == "0" for r in body)


@pytest.mark.parametrize("argv", [
    ["collective", "--kind", "adc", "--mode", "corr"],
    ["collective", "--kind", "nope"],
    ["collective", "--kind", "dep", "--p-count", "1"],
    ["collective", "--kind", "dep", "--p-max", "1.5"],
    ["compare", "--kind", "dep", "--d", "7"],
    ["individual", "--dims", "1"],
    ["individual", "--dims", "x"],
    ["individual", "--theta-max", "2"],
    ["montecarlo", "--d", "3"],
    ["montecarlo", "--d", "3", "--noise", "dep:ind"],
    ["montecarlo", "--d", "12", "--noise", "dep:ind:0.1"],
    ["montecarlo", "--d", "3", "--noise", "dep:ind:0.1", "--cloning", "0.3"],
    ["bogus"],
])
def test_argument_errors_exit_1(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        code = main(argv)
        raise SystemExit(code)
    assert exc.value.code == 1


def test_compare_zero_noise(capsys):
    code, out, _ = _run(["compare", "--kind", "dpf", "--d", "3", "--p-count", "3"], capsys)
    assert code == 0
    rows = _rows(out)
    assert rows[0] == COMPARE_COLUMNS
    labels = [r[0] for r in rows[1:]]
    assert labels == ["2xLM05"] * 3 + ["d2LM05"] * 3
    for r in rows[1:]:
        if r[2] == "0":
            assert float(r[4]) == pytest.approx(math.log2(9))


@pytest.mark.parametrize("name,argv", [
    ("compare_dep_corr_d2.csv", ["compare", "--kind", "dep", "--mode", "corr", "--d", "2"]),
    ("compare_dep_corr_d3.csv", ["compare", "--kind", "dep", "--mode", "corr", "--d", "3"]),
    ("compare_dpf_corr_d2.csv", ["compare", "--kind", "dpf", "--mode", "corr", "--d", "2"]),
    ("compare_dpf_corr_d3.csv", ["compare", "--kind", "dpf", "--mode", "corr", "--d", "3"]),
    ("collective_adc_ind.csv", ["collective", "--kind", "adc", "--dims", "3,4", "--p-count", "11"]),
    ("individual_d2_d3.csv", ["individual", "--dims", "2,3", "--theta-count", "11"]),
])
def test_golden_files(name, argv, capsys):
    code, out, _ = _run(argv, capsys)
    assert code == 0
    got = _rows(out.split("\n\n")[0] if name.startswith("individual") else out)
    want = _rows((GOLDEN / name).read_text())
    _assert_csv_close(got, want)


def test_montecarlo_output_is_deterministic(capsys):
    argv = ["montecarlo", "--d", "3", "--rounds", "20000", "--seed", "7", "--noise", "dep:ind:0.3"]
    code1, out1, err1 = _run(argv, capsys)
    code2, out2, _ = _run(argv + ["--workers", "3"], capsys)
    assert code1 == code2 == 0
    assert out1 == out2
    rows = _rows(out1)
    assert rows[0] == MONTECARLO_COLUMNS
    assert [r[0] for r in rows[1:]] == ["all", "computational", "fourier"]
    assert "max |z|" in err1


def test_montecarlo_noiseless(capsys):
    code, out, _ = _run(["montecarlo", "--d", "2", "--rounds", "10000", "--seed", "7",
                         "--noise", "dep:ind:0.0"], capsys)
    assert code == 0
    rows = _rows(out)
    col = rows[0].index("Qk_hat")
    assert all(r[col] == "0" for r in rows[1:])


def test_montecarlo_cloning(capsys):
    code, out, _ = _run(["montecarlo", "--d", "2", "--rounds", "50000", "--cloning", str(np.pi / 2)], capsys)
    assert code == 0
    rows = _rows(out)
    assert float(rows[1][rows[0].index("Pdet_target")]) == pytest.approx(0.375)


def test_validate_exit_zero(capsys):
    code, out, _ = _run(["validate"], capsys)
    assert code == 0
    assert "FAIL" not in out
    assert "gamma" in out and "printed form matches oracle" in out


def test_validate_reports_failures(monkeypatch, capsys):
    from lm05 import validation

    def broken():
        raise RuntimeError("boom")

    monkeypatch.setattr(validation, "CHECKS", (broken,))
    monkeypatch.setattr("lm05.cli.run_all", lambda: validation.run_all((broken,)))
    code, out, err = _run(["validate"], capsys)
    assert code == 2
    assert "FAIL" in out and "boom" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "lm05", "collective", "--kind", "dpf",
                          "--dims", "3", "--p-count", "2"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.splitlines()[0] == ",".join(COLLECTIVE_COLUMNS)
