import csv
import io
import json
import subprocess
import sys

import pytest

from nullstate.cli import main, to_json


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *args):
    code, out, _ = run(capsys, *args)
    return code, json.loads(out)


def run_csv(capsys, *args):
    code, out, _ = run(capsys, *args, "--output", "csv")
    lines = out.splitlines()
    assert lines[0].startswith("# config: ")
    json.loads(lines[0][len("# config: "):])
    return code, list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_params(capsys):
    code, d = run_json(capsys, "params", "--kappa", "6")
    assert code == 0 and d["result"]["central_charge"] == 0
    assert d["config"]["kappa"] == 6 and d["config"]["command"] == "params"
    code, d = run_json(capsys, "params", "--kappa", "8/3")
    assert d["result"]["one_leg_weight"] == 0.625


def test_diagrams(capsys):
    code, d = run_json(capsys, "diagrams", "--n", "3")
    assert code == 0 and d["result"]["count"] == 5 and len(d["result"]["diagrams"]) == 5
    code, rows = run_csv(capsys, "diagrams", "--n", "2")
    assert [r["pairs"] for r in rows] == ["1-2;3-4", "1-4;2-3"]


def test_cardy(capsys):
    code, d = run_json(capsys, "cardy", "--ratio", "1")
    assert d["result"]["probability"] == 0.5
    code, rows = run_csv(capsys, "cardy", "--ratio", "0.5,2")
    assert float(rows[0]["probability"]) + float(rows[1]["probability"]) == pytest.approx(1, abs=1e-12)


def test_eval_and_errors(capsys):
    code, d = run_json(capsys, "eval", "--solution", "s2", "--kappa", "4", "--point", "0,1,2,3")
    assert d["result"]["value"] == pytest.approx(0.28867513459481287, rel=1e-15)
    code, out, err = run(capsys, "eval", "--solution", "s2", "--kappa", "4", "--point", "0,2,1,3")
    assert code == 2 and "increasing" in err and out == ""
    code, _, err = run(capsys, "params", "--kappa", "6", "--nonsense")
    assert code == 2 and "usage" in err
    code, _, err = run(capsys, "params", "--kappa", "9")
    assert code == 2


def test_check_pde(capsys, tmp_path):
    code, d = run_json(capsys, "check-pde", "--solution", "s2", "--kappa", "6", "--c1", "0", "--c2", "1",
                       "--count", "3", "--order-points", "1")
    assert code == 0 and d["passed"] is True
    pts = tmp_path / "pts.json"
    pts.write_text(json.dumps({"points": [[0, 1, 2, 4], [0.5, 1.5, 3, 5]]}))
    code, d = run_json(capsys, "check-pde", "--solution", "counterexample", "--kappa", "4", "--n", "2",
                       "--points", str(pts), "--order-points", "1")
    assert code == 0 and d["result"]["report"]["ward"][1] > 0.1
    # a handle checked at the wrong tolerance fails with exit status 1
    code, d = run_json(capsys, "check-pde", "--solution", "s2", "--kappa", "6", "--count", "2",
                       "--tol", "1e-15", "--order-points", "1")
    assert code == 1 and d["passed"] is False


def test_collapse_and_dual_vector(capsys):
    code, d = run_json(capsys, "collapse", "--solution", "s2", "--kappa", "6", "--c1", "1", "--c2", "0",
                       "--interval", "1", "--classify")
    assert abs(d["result"]["value"]) < 1e-10 and d["result"]["classification"]["label"] == "two_leg"
    assert {"value", "exponent_fit", "stderr"} <= set(d["result"])
    code, d = run_json(capsys, "dual-vector", "--solution", "s2", "--kappa", "6", "--c1", "1", "--c2", "0")
    assert d["result"]["values"] == pytest.approx(d["result"]["expected"], abs=1e-10)
    code, d = run_json(capsys, "dual-vector", "--solution", "constant", "--n", "3",
                       "--anchor", "0,1,2,3,4,5")
    assert d["result"]["values"] == pytest.approx([1] * 5)
    code, rows = run_csv(capsys, "collapse", "--solution", "s1", "--kappa", "4", "--scale", "2", "--outer")
    assert float(rows[0]["value"]) == pytest.approx(2)


def test_percolate(capsys):
    args = ("percolate", "--width", "24", "--height", "24", "--trials", "3000", "--seed", "42", "--compare")
    code, d1 = run_json(capsys, *args)
    code2, d2 = run_json(capsys, *args)
    assert d1 == d2 and code == 0 and d1["passed"] is True and d1["config"]["seed"] == 42
    code, rows = run_csv(capsys, "percolate", "--ratios", "0.5,1", "--height", "16", "--trials", "2000",
                         "--compare")
    assert list(rows[0]) == ["R", "p_hat", "stderr", "cardy", "z"] and len(rows) == 2
    code, d = run_json(capsys, "percolate", "--width", "8", "--height", "8", "--p", "0.2",
                       "--trials", "500", "--compare")
    assert code == 1 and d["passed"] is False
    code, d = run_json(capsys, "percolate", "--kind", "triangular-site", "--width", "12", "--height", "12",
                       "--trials", "200", "--threads", "1")
    assert code == 0 and d["passed"] is None and d["config"]["threads"] == 1


def test_float_format_round_trips():
    x = 0.1 + 0.2
    text = to_json({"x": x, "nan": float("nan")})
    assert json.loads(text) == {"x": x, "nan": None}
    assert "0.30000000000000004" in text


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "nullstate", "cardy", "--ratio", "1"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0 and json.loads(r.stdout)["result"]["probability"] == 0.5
