import json
import math
import subprocess
import sys

import pytest

from wq1d.cli import main, parse_n


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_n():
    assert parse_n("16..128") == [16, 32, 64, 128]
    assert parse_n("3..20") == [4, 8, 16]
    assert parse_n("1..1") == [1]
    assert parse_n("3,5,9") == [3, 5, 9]
    assert parse_n("7") == [7]
    assert parse_n([4, 8]) == [4, 8]
    for bad in ("5..3", "x", "3..3"):
        with pytest.raises(ValueError):
            parse_n(bad)


def test_error_uniform(capsys):
    code, out, _ = run(capsys, "error", "--dist", "family=uniform", "--rho", "2", "--n", "100",
                       "--method", "optimal")
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(1 / (200 * math.sqrt(3)), rel=1e-10)


def test_error_dirac(capsys):
    code, out, _ = run(capsys, "error", "--dist", "family=atoms points=0 weights=1", "--rho", "1",
                       "--n", "7")
    assert code == 0 and json.loads(out)["value"] == 0.0


def test_sweep_pareto_order(capsys):
    code, out, _ = run(capsys, "sweep", "--dist", "family=pareto beta=4", "--rho", "2", "--n",
                       "16..16384", "--method", "midpoint")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "N,e_N,N_alpha_eN,fitted_order"
    assert len(lines) == 12  # header + 2^4 .. 2^14
    assert float(lines[-1].split(",")[3]) == pytest.approx(0.25, abs=0.01)


def test_infinite_result_exits_zero(capsys):
    code, out, _ = run(capsys, "error", "--dist", "family=pareto beta=1.5", "--rho", "2",
                       "--n", "10")
    assert code == 0 and json.loads(out)["value"] == "inf"


def test_cross_check(capsys):
    code, out, _ = run(capsys, "error", "--dist", "family=gaussian", "--rho", "1.5", "--n", "8",
                       "--cross-check")
    doc = json.loads(out)
    assert doc["quantile_form"]["formula"] == "quantile_form"
    assert doc["cdf_form"]["formula"] == "cdf_form"
    assert doc["rel_diff"] <= 1e-8


def test_per_cell_csv(capsys):
    code, out, _ = run(capsys, "error", "--dist", "family=uniform", "--n", "4", "--per-cell",
                       "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "i,cell_error_pow" and len(lines) == 5


def test_w1_closed_formula(capsys):
    code, out, _ = run(capsys, "error", "--dist", "family=atoms points=0,1 weights=0.5,0.5",
                       "--n", "3", "--formula", "w1_closed")
    assert json.loads(out)["value"] == 1 / 6


def test_quantize_csv(capsys):
    code, out, _ = run(capsys, "quantize", "--dist", "family=uniform", "--n", "4")
    assert out.splitlines() == ["i,x_i", "1,0.125", "2,0.375", "3,0.625", "4,0.875"]


def test_tails_and_classify(capsys):
    _, out, _ = run(capsys, "tails", "--dist", "family=pareto beta=4", "--beta", "4")
    assert json.loads(out)["finite_x"] is True
    _, out, _ = run(capsys, "classify", "--dist", "family=pareto beta=4", "--rho", "2",
                    "--alpha", "0.3")
    assert json.loads(out)["conclusion"] == "unbounded"
    _, out, _ = run(capsys, "classify", "--dist", "family=uniform", "--rho", "2", "--alpha",
                    "0.5", "--format", "csv")
    assert out.splitlines()[-1].startswith("conclusion,,bounded")


def test_baseline_deterministic(capsys):
    argv = ("baseline", "--dist", "family=uniform", "--n", "32", "--reps", "5", "--seed", "9")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv, "--threads", "2")
    assert a == b and json.loads(a)["reps"] == 5


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"dist": "family=uniform", "rho": 2, "n": 10}))
    _, out, _ = run(capsys, "error", "--config", str(cfg))
    assert json.loads(out)["value"] == pytest.approx(1 / (20 * math.sqrt(3)))
    _, out, _ = run(capsys, "error", "--config", str(cfg), "--n", "100")
    assert json.loads(out)["n"] == 100


def test_config_n_values(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"dist": "family=uniform", "rho": 1, "n_values": [4, 8, 16, 32]}))
    _, out, _ = run(capsys, "sweep", "--config", str(cfg))
    assert len(out.splitlines()) == 5


@pytest.mark.parametrize("argv", [
    ("error", "--dist", "family=nope", "--n", "3"),
    ("error", "--dist", "family=uniform"),
    ("error", "--dist", "family=uniform", "--n", "4..16"),
    ("error", "--dist", "family=uniform", "--n", "4", "--rho", "0.5"),
    ("error", "--dist", "family=uniform", "--n", "4", "--method", "tail_modified"),
    ("tails", "--dist", "family=uniform"),
    ("classify", "--dist", "family=uniform", "--alpha", "2"),
    ("error", "--config", "/nonexistent.json"),
])
def test_usage_errors(capsys, argv):
    with pytest.raises(SystemExit) as exc:
        main(list(argv))
    assert exc.value.code == 2
    assert "error" in capsys.readouterr().err


def test_both_n_and_n_values_rejected(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"dist": "family=uniform", "n": 4, "n_values": [4, 8]}))
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--config", str(cfg)])
    assert exc.value.code == 2


def test_output_file_is_byte_stable(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        main(["sweep", "--dist", "family=gaussian", "--rho", "1.5", "--n", "4..64",
              "--output", str(p)])
    assert a.read_bytes() == b.read_bytes()
    assert capsys.readouterr().out == ""


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "wq1d.cli", "error", "--dist", "family=uniform",
                        "--n", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["value"] == pytest.approx(0.125)
