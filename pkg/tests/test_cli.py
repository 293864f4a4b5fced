import json
import subprocess
import sys

import pytest

from renormlab.cli import main
from renormlab.renorm import FixedPointSolution


def run(*args, env=None, cwd=None):
    return subprocess.run([sys.executable, "-m", "renormlab", *args], capture_output=True,
                          env=env, cwd=cwd, timeout=600)


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "pd.json"
    assert main(["solve", "--type", "pd", "--ell", "2", "--degree", "40", "--out", str(path)]) == 0
    return path


def test_solve_writes_solution(solved):
    sol = FixedPointSolution.from_json(solved.read_text())
    assert abs(abs(sol.alpha) - 2.502907875) <= 1e-6
    assert sol.residual <= 1e-11


def test_solve_is_reproducible(solved, tmp_path):
    again = tmp_path / "again.json"
    assert main(["solve", "--ell", "2", "--degree", "40", "--out", str(again)]) == 0
    assert again.read_bytes() == solved.read_bytes()


def test_verify_pass_and_fail(solved, tmp_path, capsys):
    assert main(["verify", str(solved)]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 10
    data = json.loads(solved.read_text())
    data["alpha"] = repr(float(data["alpha"]) * 1.001)
    data["tau"] = repr(float(data["alpha"]) ** 2)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert main(["verify", str(bad)]) == 4
    assert "FAIL functional equation" in capsys.readouterr().out


def test_invalid_inputs_exit_three(tmp_path):
    assert main(["solve", "--tol", "1e-20"]) == 3
    assert main(["solve", "--degree", "8"]) == 3
    assert main(["solve", "--type", "[3,1,2,4]"]) == 3
    assert main(["solve", "--ell", "1.0"]) == 3
    assert main(["sweep", "--ells", "4,2"]) == 3
    assert main(["solve", "--out", str(tmp_path / "missing" / "x.json")]) == 3
    assert main(["julia", "--viewport", "0,1,2"]) == 3
    assert run("solve", "--bogus").returncode == 3
    assert run("solve", "--precision", "quad").returncode == 3


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"ell": 4.0, "degree": 40}))
    out = tmp_path / "s.json"
    assert main(["--config", str(cfg), "solve", "--out", str(out)]) == 0
    sol = FixedPointSolution.from_json(out.read_text())
    assert sol.ell == 4.0 and sol.E.degree == 40
    assert main(["--config", str(cfg), "solve", "--ell", "2", "--out", str(out)]) == 0
    assert FixedPointSolution.from_json(out.read_text()).ell == 2.0
    cfg.write_text("[1, 2]")
    assert main(["--config", str(cfg), "solve"]) == 3


def test_precision_from_environment(tmp_path):
    import os
    env = dict(os.environ, RENORM_PRECISION="dd")
    out = tmp_path / "dd.json"
    proc = run("solve", "--degree", "40", "--out", str(out), env=env)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(out.read_text())["precision"] == "dd"
    env["RENORM_PRECISION"] = "quad"
    assert run("solve", "--degree", "40", env=env).returncode == 3


def test_sweep_csv_with_footer(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--ells", "2,4,8", "--degree", "40", "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "ell,tau,alpha,residual,iters"
    assert len(lines) == 5 and lines[-1].startswith("tau_inf=")
    taus = [float(line.split(",")[1]) for line in lines[1:4]]
    assert taus == sorted(taus)


def test_no_convergence_exit_two(tmp_path):
    out = tmp_path / "fail.json"
    # ell = 512 from a cold start at degree 16 cannot be resolved
    code = main(["solve", "--ell", "512", "--degree", "16", "--out", str(out)])
    assert code == 2
    diag = json.loads(out.read_text())
    assert diag["status"] == "no-convergence"


def test_julia_writes_pgm_and_sidecar(tmp_path):
    out = tmp_path / "j.pgm"
    assert main(["julia", "--width", "40", "--height", "32", "--out", str(out)]) == 0
    data = out.read_bytes()
    assert data.startswith(b"P5\n40 32\n255\n") and len(data) == len(b"P5\n40 32\n255\n") + 40 * 32
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["b_f"] < meta["z0"] < 1.0 and meta["unknown_fraction"] <= 0.05
    assert main(["julia", "--a", "0.5", "--c", "0.2", "--out", str(out)]) == 4


def test_limit_outputs(tmp_path):
    out, diag = tmp_path / "limit.json", tmp_path / "diag.csv"
    code = main(["limit", "--ells", "2,4,8,16,32", "--out", str(out), "--diagnostics", str(diag)])
    assert code == 0
    est = json.loads(out.read_text())
    assert float(est["C0"]) < 0 and float(est["epsilon"]) > 0
    assert len(diag.read_text().strip().splitlines()) == 6
