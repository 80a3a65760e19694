import json
import subprocess
import sys
from pathlib import Path

import pytest

from fraclab.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(*args, cwd=None):
    proc = subprocess.run(
        [sys.executable, "-m", "fraclab", *map(str, args)],
        capture_output=True,
        text=True,
        cwd=cwd,
    )
    return proc.returncode, proc.stdout, proc.stderr


def write_config(tmp_path, **values):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(values))
    return path


# ---- caputo -----------------------------------------------------------------


def test_caputo_examples():
    assert run("caputo", "--expr", "1*t^1", "--alpha", "0.5")[:2] == (0, "1.128379167095513*t^0.5\n")
    assert run("caputo", "--expr", "5", "--alpha", "0.5")[:2] == (0, "0\n")
    code, out, err = run("caputo", "--expr", "1*t^-0.25", "--alpha", "0.5")
    assert code == 3 and "StrictModeError" in err and out == ""


def test_caputo_extended_and_parse_error():
    code, out, _ = run("caputo", "--expr", "2*x*t^-0.5", "--alpha", "0.5", "--mode", "extended")
    assert code == 0 and out == "0\n"  # Γ(0.5)/Γ(0) = 0
    code, _, err = run("caputo", "--expr", "1*t^^2", "--alpha", "0.5")
    assert code == 2 and "ParseError" in err


def test_usage_errors():
    assert run("caputo", "--alpha", "0.5")[0] == 2
    assert run("no-such-command")[0] == 2
    assert run()[0] == 2


# ---- verify -----------------------------------------------------------------


def test_verify_third_order():
    code, out, err = run("verify", "--equation", "third_order", "--q", "2", "--alpha", "0.5")
    doc = json.loads(out)
    assert code == 0 and doc["matches_paper"] is True and doc["certified"] is True
    assert "matches_paper: true" in err


def test_verify_diffusion_mismatch():
    code, out, err = run("verify", "--equation", "diffusion", "--p", "2", "--alpha", "0.5")
    doc = json.loads(out)
    assert code == 0
    assert doc["matches_paper"] is False
    assert doc["constant"] > 0 and doc["paper_constant"] == 0.0
    assert "matches_paper: false" in err


def test_verify_degenerate():
    code, out, err = run("verify", "--equation", "diffusion", "--p", "2", "--alpha", "1.0")
    assert code == 3 and "NoRealSolutionError" in err
    code, _, err = run("verify", "--equation", "third_order", "--q", "1", "--alpha", "0.5")
    assert code == 3 and "pole" in err


def test_verify_missing_parameter():
    assert run("verify", "--equation", "diffusion", "--alpha", "0.5")[0] == 2


def test_verify_uncertified_exits_3(monkeypatch):
    monkeypatch.setenv("FRACLAB_TOL", "-1")
    assert main(["verify", "--equation", "diffusion", "--p", "2", "--alpha", "0.5"]) == 3


# ---- bvp-check ----------------------------------------------------------------


def test_bvp_check_diffusion():
    code, out, _ = run("bvp-check", "--equation", "diffusion", "--c1", 1, "--c2", 1, "--c3", 1, "--p", 2, "--alpha", 0.5)
    doc = json.loads(out)
    assert code == 0
    assert doc["constraints"]["boundary_line"]["required_zero"] == ["c1"]
    assert doc["constraints"]["required_zero"] == ["c1"]
    assert doc["boundary_exponents"]["boundary_x0"]["exponent"] == 2.0


def test_bvp_check_third_order_alias():
    code, out, _ = run("bvp_check", "--equation", "third_order", "--c1", 1, "--c3", 1, "--c4", 1, "--q", 2, "--alpha", 0.5)
    doc = json.loads(out)
    assert code == 0
    assert doc["constraints"]["initial_line"]["required_zero"] == ["c4"]
    assert doc["boundary_exponents"]["boundary_x0"]["exponent"] == pytest.approx(1.25)


def test_bvp_check_preset():
    code, out, _ = run("bvp-check", "--preset", "X1", "--alpha", 0.5)
    doc = json.loads(out)
    assert code == 0 and doc["constraints"]["admissible"] is True
    assert doc["similarity_form"]["z_exponent"] == [1.0, -0.25]


def test_bvp_check_raw_and_degenerate():
    code, out, _ = run("bvp-check", "--e0", 1.0)
    doc = json.loads(out)
    assert code == 0
    assert doc["similarity_form"] is None and "DegenerateError" in doc["similarity_form_reason"]
    assert run("bvp-check")[0] == 3
    assert run("bvp-check", "--preset", "Y2", "--q", 2)[0] == 2


# ---- solve / converge -------------------------------------------------------------


def test_converge_mms_config(tmp_path):
    code, out, _ = run("converge", CONFIGS / "mms.json", "--out-dir", tmp_path)
    assert code == 0
    table = (tmp_path / "convergence.csv").read_text()
    assert table == out
    last = table.splitlines()[-1].split(",")
    assert 1.2 <= float(last[-1]) <= 1.8
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["subcommand"] == "converge"
    assert manifest["parameters"]["levels"] == 4
    assert manifest["outputs"] == [str(tmp_path / "convergence.csv")]
    assert manifest["duration_s"] >= 0 and manifest["version"]


def test_solve_similarity_config(tmp_path):
    code, out, _ = run("solve", CONFIGS / "similarity.json", "--out-dir", tmp_path)
    assert code == 0
    summary = json.loads(out)
    assert summary["within_data_bounds"] is True and summary["max_error"] < 0.02
    header = (tmp_path / "field.csv").read_text().splitlines()[0]
    assert header == "t,x,u,reference,abs_error"
    assert json.loads((tmp_path / "manifest.json").read_text())["subcommand"] == "solve"


def test_config_errors(tmp_path):
    good = dict(alpha=0.5, p=1, x_lo=0, x_hi=1, t_final=1, nx=8, nt=8, mode="mms", u_star="x^2*t^2")
    code, _, err = run("solve", write_config(tmp_path, **{**good, "x_lo": 1}))
    assert code == 2 and "ConfigError" in err
    code, _, err = run("solve", write_config(tmp_path, **{**good, "extra": 1}))
    assert code == 2 and "extra" in err
    code, _, err = run("solve", write_config(tmp_path, **{**good, "p": 0}))
    assert code == 2
    code, _, err = run("solve", write_config(tmp_path, **{**good, "u_star": "x^^2"}))
    assert code == 2
    bad = tmp_path / "broken.json"
    bad.write_text("{")
    assert run("solve", bad)[0] == 2
    assert run("solve", tmp_path / "missing.json")[0] == 2
    code, _, _ = run("converge", write_config(tmp_path, **{**good, "levels": 2}))
    assert code == 2


def test_divergence_exit_code(tmp_path):
    cfg = write_config(
        tmp_path, alpha=0.5, p=3, x_lo=1, x_hi=2, t_final=1, nx=8, nt=4, mode="mms",
        u_star="1e120*x^2*t^2 + 1e120",
    )
    code, _, err = run("solve", cfg)
    assert code == 4 and "DivergenceError" in err


# ---- leibniz -------------------------------------------------------------------


def test_leibniz_examples():
    code, out, _ = run("leibniz", "--a", 1, "--b", 1, "--alpha", 0.5, "--n-terms", 3)
    doc = json.loads(out)
    assert code == 0
    errs = [row["abs_error"] for row in doc["truncations"]]
    assert len(errs) == 3 and errs[2] <= 1e-10 * doc["closed_form"]
    code, out, _ = run("leibniz", "--a", 0.5, "--b", 0, "--alpha", 0.5, "--n-terms", 1)
    doc = json.loads(out)
    assert doc["truncations"][0]["abs_error"] <= 1e-15
    code, out, _ = run("leibniz", "--a", 1, "--b", 2, "--alpha", 1, "--n-terms", 4)
    doc = json.loads(out)
    # (α choose n) = 0 for n >= 2 when α = 1: product rule, exact from two terms
    assert [r["abs_error"] for r in doc["truncations"]][1:] == [0.0, 0.0, 0.0]


# ---- determinism -----------------------------------------------------------------


@pytest.mark.parametrize(
    "args",
    [
        ("caputo", "--expr", "3*x^0.5*t^2 + t", "--alpha", "0.3"),
        ("verify", "--equation", "third_order", "--q", "1.5", "--alpha", "0.3"),
        ("bvp-check", "--preset", "Y1", "--q", "2"),
        ("leibniz", "--a", "0.5", "--b", "2", "--alpha", "0.25"),
        ("solve", str(CONFIGS / "similarity.json")),
    ],
)
def test_byte_stable(args, tmp_path):
    first = run(*args, "--out-dir", tmp_path / "a")
    second = run(*args, "--out-dir", tmp_path / "b")
    assert first == second
    files_a = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files_a == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in files_a:
        if name != "manifest.json":
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
