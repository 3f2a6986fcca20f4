import json
import os
import subprocess
import sys

import pytest

from bandxfer.cli import ConfigError, RunConfig, main, run


def _write(tmp_path, cfg):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(cfg))
    return str(p)


def test_config_round_trip():
    cfg = RunConfig("crossover", n=16, W=3.0, xis=(0.5, 1.0), singlePrecision=True)
    assert RunConfig.from_dict(cfg.to_dict()) == cfg


@pytest.mark.parametrize("bad", [
    {"command": "crossover", "nn": 3},
    {"command": "crossover", "n": 2.5},
    {"command": "crossover", "singlePrecision": 1},
    {"command": "crossover", "engine": "spherical"},
    {"command": "launch"},
    {"n": 4},
    {"command": "transfer-spectrum", "howMany": 1},
])
def test_config_rejects(bad):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(bad)


def test_crossover_outputs_and_manifest(tmp_path):
    out = tmp_path / "o"
    rc = main(["crossover", "--config", _write(tmp_path, {"n": 8, "W": 1.0, "samples": 200, "xis": [0.0, 0.5]}),
               "--output", str(out)])
    assert rc == 0
    lines = (out / "crossover.csv").read_text().splitlines()
    assert lines[0] == "xi,ratio,std_error,samples,regime,sine_kernel"
    assert lines[1].startswith("0.0,1.0,0.0,200,")
    man = json.loads((out / "manifest.json").read_text())
    assert man["command"] == "crossover" and man["outputs"] == ["crossover.csv"]
    assert man["config"]["n"] == 8


def test_byte_identical_reruns(tmp_path):
    cfg = {"n": 8, "W": 1.5, "samples": 100, "seed": 3}
    for d in ("a", "b"):
        assert main(["crossover", "--config", _write(tmp_path, cfg), "--output", str(tmp_path / d)]) == 0
    assert (tmp_path / "a" / "crossover.csv").read_bytes() == (tmp_path / "b" / "crossover.csv").read_bytes()


def test_unknown_key_writes_error(tmp_path, capsys):
    out = tmp_path / "err"
    rc = main(["crossover", "--config", _write(tmp_path, {"samplez": 3}), "--output", str(out)])
    assert rc == 2
    err = json.loads((out / "error.json").read_text())
    assert err["error"] == "ConfigError" and "samplez" in err["message"]
    assert json.loads(capsys.readouterr().err)["command"] == "crossover"


def test_command_mismatch(tmp_path):
    rc = main(["crossover", "--config", _write(tmp_path, {"command": "susy-check"}), "--output", str(tmp_path)])
    assert rc == 2


def test_module_failure_exit_code(tmp_path):
    # E outside the band is rejected by the ensemble module, not by the config layer
    rc = main(["crossover", "--config", _write(tmp_path, {"E": 3.0}), "--output", str(tmp_path / "x")])
    assert rc == 1
    assert json.loads((tmp_path / "x" / "error.json").read_text())["error"] == "DomainError"


def test_angular_check(tmp_path):
    run(RunConfig("angular-check", jMax=2, angularT=(1.0, 5.0), output=str(tmp_path)))
    rows = (tmp_path / "angular_check.csv").read_text().splitlines()[1:]
    assert len(rows) == 6
    assert max(float(r.split(",")[-1]) for r in rows) < 1e-10


def test_transfer_spectrum_polar(tmp_path):
    run(RunConfig("transfer-spectrum", W=4.0, engine="polar", perAxisOrder=8, jMax=2, howMany=3, output=str(tmp_path)))
    rows = (tmp_path / "spectrum.csv").read_text().splitlines()
    assert rows[0] == "engine,index,re,im,abs,residual,sector"
    assert len(rows) == 4 and rows[1].startswith("polar,0,")
    assert json.loads((tmp_path / "spectrum_polar.json").read_text())["engine"] == "polar"


def test_susy_check_single_site(tmp_path):
    run(RunConfig("susy-check", n=1, W=2.0, E=0.5, samples=20000, output=str(tmp_path)))
    head, row = (tmp_path / "susy_check.csv").read_text().splitlines()
    vals = dict(zip(head.split(","), row.split(",")))
    assert float(vals["f2_transfer_re"]) == pytest.approx(1.25, abs=1e-9)
    assert abs(float(vals["z_score"])) < 4


def test_density_check(tmp_path):
    run(RunConfig("density-check", n=32, W=3.0, samples=20, bins=20, output=str(tmp_path)))
    summary = json.loads((tmp_path / "density_summary.json").read_text())
    assert summary["eigenvalues"] == 640
    assert summary["kolmogorov"] < 0.1


def test_console_script_threads(tmp_path):
    cfg = _write(tmp_path, {"n": 6, "samples": 100})
    env = dict(os.environ, BANDXFER_THREADS="1")
    out = tmp_path / "t"
    subprocess.run([sys.executable, "-m", "bandxfer.cli", "crossover", "--config", cfg, "--output", str(out)],
                   check=True, env=env)
    assert json.loads((out / "manifest.json").read_text())["threads"] == "1"
