# SPDX-License-Identifier: Apache-2.0
import csv
import json
import os
import subprocess


def run(cli, *args, env=None):
    return subprocess.run([cli, *args], capture_output=True, text=True, env=env)


def write(path, data):
    path.write_text(json.dumps(data))
    return path


def test_sweep_outputs(cli, tmp_path):
    config = write(tmp_path / "cfg.json", {"n_list": [8], "spacing_list": [0.25], "trials": 3,
                                           "architectures": ["FC", "TC"], "awareness": ["aware", "unaware"]})
    out = tmp_path / "out"
    result = run(cli, "sweep-n", "--config", str(config), "--out", str(out), "--seed", "4")
    assert result.returncode == 0, result.stderr
    with open(out / "trials.csv") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["experiment", "n", "spacing_wl", "architecture", "awareness", "trial", "gain_linear",
                       "gain_db", "bound_linear", "residual", "runtime_ms", "error"]
    assert len(rows) == 1 + 2 * 2 * 3
    with open(out / "summary.csv") as f:
        assert len(list(csv.reader(f))) == 1 + 4
    plot = json.loads((out / "plot_spec.json").read_text())
    assert plot["x"]["field"] == "n"


def test_sweeps_are_byte_identical(cli, tmp_path):
    config = write(tmp_path / "cfg.json", {"n_list": [4], "spacing_list": [0.5, 0.25], "trials": 4})
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert run(cli, "sweep-d", "--config", str(config), "--out", str(a), "--threads", "1").returncode == 0
    assert run(cli, "sweep-d", "--config", str(config), "--out", str(b), "--threads", "2").returncode == 0
    for name in ("trials.csv", "summary.csv", "plot_spec.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_optimize_instance(cli, tmp_path, configs):
    out = tmp_path / "opt"
    result = run(cli, "optimize", "--config", str(configs / "optimize_instance.json"), "--out", str(out))
    assert result.returncode == 0, result.stderr
    data = json.loads((out / "result.json").read_text())
    assert abs(data["achieved_gain"] / data["bound_gain"] - 1.0) <= 1e-8
    assert data["load"]["kind"] == "susceptance_siemens"


def test_coupling_export(cli, tmp_path):
    config = write(tmp_path / "cfg.json", {"n_list": [8], "spacing_list": [0.5]})
    out = tmp_path / "cpl"
    assert run(cli, "coupling", "--config", str(config), "--out", str(out)).returncode == 0
    meta = json.loads((out / "coupling.json").read_text())
    assert meta["n"] == 8 and meta["passive"]


def test_config_errors_exit_with_code_2(cli, tmp_path):
    bad = write(tmp_path / "bad.json", {"n_list": [8], "no_such_key": 1})
    assert run(cli, "sweep-n", "--config", str(bad), "--out", str(tmp_path / "o")).returncode == 2
    assert run(cli, "sweep-n", "--config", str(tmp_path / "missing.json")).returncode == 2
    assert run(cli, "optimize").returncode == 2
    assert run(cli, "no-such-command").returncode == 2
    invalid = (tmp_path / "invalid.json")
    invalid.write_text("{ not json")
    assert run(cli, "sweep-n", "--config", str(invalid)).returncode == 2


def test_thread_environment_override(cli, tmp_path):
    config = write(tmp_path / "cfg.json", {"n_list": [4], "spacing_list": [0.5], "trials": 2})
    env = dict(os.environ, COUPLED_RIS_THREADS="zero")
    assert run(cli, "sweep-n", "--config", str(config), "--out", str(tmp_path / "o"), env=env).returncode == 2


def test_selftest(cli):
    result = run(cli, "selftest")
    assert result.returncode == 0, result.stdout
    assert "FAIL" not in result.stdout
