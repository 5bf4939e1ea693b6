import json
import math
import subprocess
import sys

import numpy as np
import pytest
from click.testing import CliRunner

from elliptic_condnum import jdf as jdf_mod
from elliptic_condnum.cli import main
from elliptic_condnum.harness import load_histogram
from elliptic_condnum.jdf import jdf_q, jdf_t
from elliptic_condnum.limits import WeakPoint, weak_jdf
from elliptic_condnum.prt import EnsembleParams


def run(*args, code=0):
    res = CliRunner().invoke(main, [str(a) for a in args])
    assert res.exit_code == code, res.output
    return res.output


def rows(text):
    lines = text.strip().splitlines()
    head = lines[0].split(",")
    return [dict(zip(head, map(float, ln.split(",")))) for ln in lines[1:]]


def test_jdf_example():
    r = rows(run("jdf", "--n", 2, "--tau", 0.5, "--z", 0, "--q", 1))
    assert r[0]["density"] == pytest.approx(0.0705, abs=5e-5)
    assert r[0]["t"] == 0.5


def test_jdf_tau0_q_equals_t():
    a = rows(run("jdf", "--n", 2, "--tau", 0, "--z", 0, "--t", 1))[0]
    b = rows(run("jdf", "--n", 2, "--tau", 0, "--z", 0, "--q", 1))[0]
    assert a["density"] == b["density"]


def test_jdf_bit_for_bit():
    r = rows(run("jdf", "--n", 4, "--tau", 0.9, "--z", 1, "--q", 0.3))[0]
    assert r["density"] == jdf_q(EnsembleParams(4, 0.9), 1.0, 0.3)
    r = rows(run("jdf", "--n", 4, "--tau", 0.9, "--z", 1, "--t", 0.3))[0]
    assert r["density"] == jdf_t(EnsembleParams(4, 0.9), 1.0, 0.3)


def test_jdf_grid_and_json():
    out = json.loads(run("jdf", "--n", 3, "--tau", 0.5, "--grid", "-1:1:3,0.5:2:4", "--format", "json"))
    assert len(out) == 12
    assert {"z", "q", "t", "density"} <= set(out[0])
    lst = rows(run("jdf", "--n", 3, "--tau", 0.5, "--z", "0,1", "--q", "1,2"))
    assert len(lst) == 4


def test_density_examples():
    r = rows(run("density", "--n", 2, "--tau", 0.5, "--z-grid", 0))
    assert r[0]["density"] == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)
    m = rows(run("density", "--n", 3, "--tau", 0.5, "--z-grid", 0, "--method", "marginal"))
    assert m[0]["density"] > 0


def test_density_odd_n_unsupported():
    res = CliRunner().invoke(main, ["density", "--n", "3", "--tau", "0.5", "--z-grid", "0"])
    assert res.exit_code == 2
    assert "unsupported: odd N" in res.output


def test_density_unit_normalization():
    r = rows(run("density", "--n", 6, "--tau", 0.5, "--z-grid", "-12:12:2401", "--normalize", "unit"))
    z = np.array([x["z"] for x in r])
    d = np.array([x["density"] for x in r])
    assert np.trapezoid(d, z) == pytest.approx(1.0, abs=1e-6)


def test_limit_examples():
    assert rows(run("limit", "--regime", "bulk", "--tau", 0, "--z", 0, "--t", 1))[0]["density"] == \
        pytest.approx(0.120985, abs=5e-7)
    assert rows(run("limit", "--regime", "weak", "--a", 1, "--z", 0, "--t", 1))[0]["density"] == \
        weak_jdf(WeakPoint(1.0, 0.0, 1.0))
    assert rows(run("limit", "--regime", "edge", "--tau", 0, "--delta", 0, "--sigma", 1))[0]["density"] == \
        pytest.approx(0.139649, abs=5e-7)


@pytest.mark.parametrize("args", [
    ["jdf", "--n", "2", "--tau", "1.5", "--z", "0", "--q", "1"],
    ["jdf", "--n", "2", "--tau", "0.5", "--z", "0", "--q", "-1"],
    ["jdf", "--n", "2", "--tau", "0.5", "--z", "0"],
    ["jdf", "--n", "2", "--tau", "0.5", "--z", "0", "--q", "1", "--t", "1"],
    ["limit", "--regime", "bulk", "--tau", "0.5", "--z", "3", "--t", "1"],
    ["limit", "--regime", "weak", "--z", "0", "--t", "1"],
    ["density", "--n", "2", "--tau", "0.5", "--z-grid", "a:b:c"],
    ["experiment", "--n", "4"],
])
def test_usage_errors_exit_2(args):
    res = CliRunner().invoke(main, args)
    assert res.exit_code == 2, res.output


def _exp_args(tmp_path, name, workers):
    return ["experiment", "--n", 5, "--tau", 0.4, "--num-matrices", 120, "--seed", 9,
            "--z-bins", "-5:5:11", "--t-bins", "0,0.5,1,3,10,inf", "--workers", workers,
            "-o", tmp_path / name]


def test_experiment_worker_invariance(tmp_path):
    a = json.loads(run(*_exp_args(tmp_path, "a.json", 1)))
    b = json.loads(run(*_exp_args(tmp_path, "b.json", 2)))
    assert a["sha256"] == b["sha256"]
    assert load_histogram(tmp_path / "a.json").digest() == a["sha256"]
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_experiment_byte_identical_repeats(tmp_path):
    out1 = run(*_exp_args(tmp_path, "a.json", 1))
    first = (tmp_path / "a.json").read_bytes()
    out2 = run(*_exp_args(tmp_path, "a.json", 1))
    assert out1 == out2 and (tmp_path / "a.json").read_bytes() == first


def test_experiment_with_model_report(tmp_path):
    cfg = {"n": 4, "tau": 0.5, "num_matrices": 2000, "seed": 2020,
           "z_bins": {"linspace": [-4, 4, 9]}, "t_bins": [0, "inf"],
           "compare": {"model": "fn"}}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    run("experiment", "--config", p, "--report", tmp_path / "rep.json")
    rep = json.loads((tmp_path / "rep.json").read_text())
    assert rep["passed"] and rep["dof"] >= 5
    # at n=4 the large-N bulk law is far off: statistical-failure exit code
    cfg.update(scaling="bulk", z_bins={"linspace": [-1.2, 1.2, 7]}, t_bins=[0, 0.5, 2, "inf"])
    p.write_text(json.dumps(cfg))
    run("experiment", "--config", p, "--model", "limit", code=4)


def test_selftest_quick():
    out = run("selftest", "--quick")
    assert out.count("PASS") == 2 and "FAIL" not in out


def test_selftest_full_passes():
    out = run("selftest")
    assert "FAIL" not in out and out.count("PASS") == 5


def test_mutation_canary(monkeypatch):
    monkeypatch.setattr(jdf_mod, "_LOG_SQRT_2PI", jdf_mod._LOG_SQRT_2PI * (1 + 1e-4))
    res = CliRunner().invoke(main, ["selftest"])
    assert res.exit_code == 3
    assert "FAIL" in res.output


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "elliptic_condnum.cli", "limit", "--regime", "bulk",
                          "--tau", "0", "--z", "0", "--t", "1"], capture_output=True, text=True, check=True)
    assert out.stdout.strip().splitlines()[-1].endswith("0.12098536225957168")
