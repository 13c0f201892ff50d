import json

import numpy as np
import pytest

from srs_ranging import config as cfgmod
from srs_ranging.cli import main
from srs_ranging.exceptions import ConfigError
from srs_ranging.nr_config import SPEED_OF_LIGHT, centered_comb_offset

CONFIG = """
[srs]
m_sc = 1000
comb_offset = center

[channel]
range_m = 2.76
snr_db = noiseless

[sweep]
m_sc_list = 48, 1000
seeds = 0
"""


@pytest.fixture
def cfg_file(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(CONFIG)
    return path


def test_defaults_build():
    spec = cfgmod.build_trial_spec(cfgmod.merged({}))
    assert spec.carrier.mu == 3 and spec.srs.k_tc == 2 and spec.srs.m_sc == 833
    assert spec.channel.snr_db is None
    assert spec.srs.comb_offset == centered_comb_offset(2, 833, 3276)


def test_overrides_win(cfg_file):
    raw = cfgmod.load_config(cfg_file)
    spec = cfgmod.build_trial_spec(cfgmod.merged(raw, {"srs": {"m_sc": 200}}))
    assert spec.srs.m_sc == 200


def test_env_var(cfg_file, monkeypatch):
    monkeypatch.setenv(cfgmod.CONFIG_ENV_VAR, str(cfg_file))
    assert cfgmod.load_config()["srs"]["m_sc"] == "1000"


def test_explicit_paths(tmp_path):
    path = tmp_path / "p.ini"
    path.write_text("[path.reference]\ndelay_ns = 0\n[path.target]\nrange_m = 2.1\n"
                    "velocity_factor = 0.7\ngain_db = -6\nphase_deg = 90\n")
    spec = cfgmod.build_trial_spec(cfgmod.merged(cfgmod.load_config(path)))
    tgt = spec.channel.path("target")
    assert tgt.delay_s == pytest.approx(2.1 / (0.7 * SPEED_OF_LIGHT))
    assert np.angle(tgt.gain, deg=True) == pytest.approx(90)


def test_bad_values():
    with pytest.raises(ConfigError):
        cfgmod.build_trial_spec(cfgmod.merged({"srs": {"m_sc": "many"}}))
    with pytest.raises(ConfigError):
        cfgmod.load_config("/nonexistent/file.ini")


def test_sweep_settings():
    m, seeds, center = cfgmod.sweep_settings(cfgmod.merged({"sweep": {"m_sc_list": "24, 96", "seeds": "1,2"}}))
    assert (m, seeds, center) == ([24, 96], [1, 2], True)
    m, _, _ = cfgmod.sweep_settings(cfgmod.merged({"sweep": {"n_points": 5}}))
    assert len(m) == 5


def test_cli_validate(capsys, cfg_file):
    assert main(["validate", "-c", str(cfg_file)]) == 0
    assert "valid" in capsys.readouterr().out
    assert main(["validate", "--k-tc", "3"]) == 2
    assert "invalid comb number" in capsys.readouterr().out
    assert main(["validate", "--range-m", "900"]) == 2
    assert "delay exceeds CP" in capsys.readouterr().out


def test_cli_trial_json(capsys, cfg_file, tmp_path):
    prof = tmp_path / "prof.txt"
    grid = tmp_path / "grid.txt"
    assert main(["trial", "-c", str(cfg_file), "--json", "--profile-out", str(prof), "--grid-out", str(grid)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["resolved"] is True
    assert abs(report["r_hat_m"] - 2.76) < 0.05
    assert prof.exists() and grid.exists()


def test_cli_trial_then_process(capsys, cfg_file, tmp_path):
    cap = tmp_path / "cap.iq"
    assert main(["trial", "-c", str(cfg_file), "--capture-out", str(cap)]) == 0
    capsys.readouterr()
    assert main(["process", "-c", str(cfg_file), str(cap)]) == 0
    out = capsys.readouterr().out
    assert "resolved: True" in out
    r_hat = float(next(line for line in out.splitlines() if line.startswith("range_hat")).split(":")[1])
    assert abs(r_hat - 2.76) < 0.05


def test_cli_process_missing_file(capsys, tmp_path):
    assert main(["process", str(tmp_path / "none.iq")]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_sweep(capsys, cfg_file, tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "-c", str(cfg_file), "-o", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "m_sc,bandwidth_hz,r_true_m,r_hat_m,abs_error_m,resolved,seed"
    assert [line.split(",")[0] for line in lines[1:]] == ["48", "1000"]
    assert "b_min_hz" in capsys.readouterr().err


def test_cli_sweep_nothing_resolved(cfg_file):
    assert main(["sweep", "-c", str(cfg_file), "--m-sc-list", "24"]) == 1


def test_cli_sweep_stdout_deterministic(capsys, cfg_file):
    outs = []
    for _ in range(2):
        main(["sweep", "-c", str(cfg_file), "--snr-db", "10", "--seeds", "1,2"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1] and outs[0].count("\n") == 5
