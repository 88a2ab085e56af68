import csv
import json

import pytest

from qpmid.cli import EXIT_INVALID, EXIT_NUMERIC, EXIT_OK, dumps, run


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_mid_design_verify(capsys):
    code, out, _ = call(capsys, "mid-design", "--n", "1", "--m", "0", "--tau", "1", "--s0", "0", "--verify")
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["design"]["a"] == [-1.0] and d["design"]["alpha"] == [1.0]
    eq = d["equivalences"]
    assert all(eq[k] for k in ("item_a", "item_b", "item_c", "item_d"))
    assert d["dominance"]["dominant"] is True


def test_mid_design_rational_arguments(capsys):
    code, out, _ = call(capsys, "mid-design", "--n", "2", "--m", "1", "--tau", "1", "--s0", "-1/2")
    d = json.loads(out)
    assert d["design"]["a_exact"] == ["17/4", "-3"]
    assert d["s0_relation_exact"] is True and d["stable"] is True


def test_counterexample(capsys):
    code, out, _ = call(capsys, "counterexample", "--l", "1")
    d = json.loads(out)
    assert code == EXIT_OK
    assert d["k"] == 2.5 and d["z"] == 3.0 and d["sv_a_violated"] is True


def test_xi_crosscheck(capsys, tmp_path):
    path = tmp_path / "xi.csv"
    code, out, _ = call(capsys, "xi", "--n", "1", "--count", "3", "--crosscheck", "--out", str(path))
    d = json.loads(out)
    assert len(d["roots"]) == 3
    assert all(r["phi_residual"] < 1e-8 for r in d["roots"])
    assert abs(d["roots"][0]["zeta"] - 8.986818916) < 1e-8
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# invocation: qpmid xi") and lines[1] == "zeta,phi_residual"


def test_pade_exact_output(capsys):
    code, out, _ = call(capsys, "pade", "--n", "2", "--m", "1", "--check-remainder", "2,3")
    d = json.loads(out)
    assert d["perron_raw"]["den"] == ["6", "4", "1"]
    assert d["exp_normalized"]["num"] == ["-6", "-2"]
    assert d["remainder_leading_coefficient"] == "1/12"
    assert d["remainder_check"]["abs_diff"] < 1e-10


def test_kummer(capsys):
    code, out, _ = call(capsys, "kummer", "--a", "1", "--b", "2", "--z", "1,0")
    d = json.loads(out)
    assert abs(d["value"][0] - 1.718281828459045) < 1e-15
    assert d["integral_residual"] < 1e-10 and d["ode_residual"] < 1e-12


def test_spectrum_and_negative_rect(capsys, tmp_path):
    f = tmp_path / "q.json"
    f.write_text(json.dumps({"version": "1", "n": 2, "m": 1, "tau": "1", "a": ["6", -4], "alpha": [-6, "-2/1"]}), encoding="utf-8")
    code, out, _ = call(capsys, "spectrum", "--input", str(f), "--rect", "-1,1,-1,1", "--tol", "1e-10")
    d = json.loads(out)
    assert code == EXIT_OK and d["count"] == 4
    assert d["roots"][0]["multiplicity"] == 4


def test_unknown_field_rejected(capsys, tmp_path):
    f = tmp_path / "q.json"
    f.write_text(json.dumps({"n": 1, "m": 0, "tau": 1, "a": [0], "alpha": [1], "extra": True}), encoding="utf-8")
    code, out, err = call(capsys, "spectrum", "--input", str(f), "--rect=-1,1,-1,1")
    assert code == EXIT_INVALID and out == ""
    diag = json.loads(err)
    assert diag["exit_code"] == 2 and "extra" in diag["message"]


def test_inconsistent_lengths_rejected(capsys, tmp_path):
    f = tmp_path / "q.json"
    f.write_text(json.dumps({"n": 2, "m": 0, "tau": 1, "a": [0], "alpha": [1]}), encoding="utf-8")
    code, _, err = call(capsys, "spectrum", "--input", str(f), "--rect=-1,1,-1,1")
    assert code == EXIT_INVALID


def test_bad_parameters_exit_2(capsys):
    code, _, err = call(capsys, "kummer", "--a", "1", "--b", "0", "--z", "1,0")
    assert code == EXIT_INVALID and json.loads(err)["error"] == "ParameterError"
    code, _, _ = call(capsys, "nonsense")
    assert code == EXIT_INVALID


def test_numerical_failure_exit_3(capsys, tmp_path, monkeypatch):
    import qpmid.cli as cli
    from qpmid.contour import ContourError

    def boom(*a, **k):
        raise ContourError("refinement exceeded")

    monkeypatch.setattr(cli.zerogeometry, "root_curve", boom)
    code, _, err = call(capsys, "curve", "--l", "1", "--kmin", "2", "--kmax", "3", "--out", str(tmp_path / "c.csv"))
    assert code == EXIT_NUMERIC and json.loads(err)["exit_code"] == 3


def test_curve_csv(capsys, tmp_path):
    path = tmp_path / "c.csv"
    code, out, _ = call(capsys, "curve", "--l", "0.5", "--kmin", "1.2", "--kmax", "4", "--step", "0.1", "--out", str(path))
    assert code == EXIT_OK
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        rows = list(csv.DictReader(fh))
    assert first.startswith("# invocation: qpmid curve --l 0.5")
    assert list(rows[0]) == ["k", "z", "residual"]
    assert any(abs(float(r["k"]) - 2.0) < 1e-12 and float(r["z"]) == 2.0 for r in rows)


def test_simulate(capsys, tmp_path):
    f = tmp_path / "q.json"
    f.write_text(json.dumps({"n": 1, "m": 0, "tau": 1, "a": [0], "alpha": [0.36787944117144233], "history": [1]}), encoding="utf-8")
    out_csv = tmp_path / "s.csv"
    code, out, _ = call(capsys, "simulate", "--input", str(f), "--horizon", "20", "--dt", "0.01", "--out", str(out_csv))
    d = json.loads(out)
    assert code == EXIT_OK and abs(d["decay_rate"] + 1) < 0.05
    assert out_csv.read_text(encoding="utf-8").splitlines()[1] == "t,y"


def test_output_is_deterministic(capsys):
    argv = ("mid-design", "--n", "3", "--m", "2", "--tau", "0.5", "--s0", "-2", "--verify")
    _, a, _ = call(capsys, *argv)
    _, b, _ = call(capsys, *argv)
    assert a == b
    assert dumps({"b": 0.1, "a": float("inf")}) == '{"a": "inf", "b": 0.1}'
