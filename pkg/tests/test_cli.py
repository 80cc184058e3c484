import json
import subprocess
import sys

import numpy as np
import pytest

import scatterlab as sl
from scatterlab import cli
from scatterlab.output import CSV_VERSION_LINE


def _write(tmp_path, payload, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


def _small_dynamics_config():
    return {
        "center": {"type": "ssh", "v": 2.0, "w": 4.0, "cells": 4},
        "lead": {"J": -0.1, "mu": 0.0, "length": 60},
        "packet": {"center_site": -30, "sigma": 6, "k": "pi/2"},
    }


def test_figure_3a_expansion():
    ((name, cfg),) = cli.figure_configs("3a")
    assert name == "fig3a"
    assert cfg.mode == "dynamics"
    assert cfg.center == sl.SSHCenter(v=2.0, w=4.0, cells=20)
    assert cfg.lead == sl.LeadSpec(J=-0.1, mu=0.0, length=200)
    assert cfg.packet.center_site == -100
    assert cfg.packet.sigma == 20.0
    assert cfg.packet.k == pytest.approx(np.pi / 2)


def test_figure_6_expansion_sets_resonant_mu():
    ((_, cfg),) = cli.figure_configs("6b")
    level = sl.nh_spectrum(40.0, 2.0, 10.0, 4).level(1)
    assert cfg.lead.mu == pytest.approx(level.real_energy)
    assert cfg.center == sl.NonHermitianSSHCenter(v=40.0, w=2.0, gamma=10.0, cells=4)


def test_figure_7_expands_to_five_scans():
    jobs = cli.figure_configs("7")
    assert [name for name, _ in jobs] == ["fig7b", "fig7c", "fig7d", "fig7e", "fig7f"]
    for _, cfg in jobs:
        assert cfg.mode == "mu-scan"
        assert cfg.scan.J == 1.0
        assert cfg.scan.k == pytest.approx(np.pi / 2)
        assert cfg.scan.step == 1e-3


def test_figure_5_sweep_includes_marked_transition():
    ((_, cfg),) = cli.figure_configs("5")
    assert cfg.mode == "q-sweep"
    assert 1.0 in cfg.sweep.q_values
    assert min(cfg.sweep.q_values) == pytest.approx(0.1)
    assert max(cfg.sweep.q_values) == pytest.approx(2.0)


def test_parse_config_happy_path(tmp_path):
    path = _write(tmp_path, _small_dynamics_config())
    cfg = cli.parse_config(path, "dynamics")
    assert cfg.center == sl.SSHCenter(v=2.0, w=4.0, cells=4)
    assert cfg.packet.k == pytest.approx(np.pi / 2)


def test_parse_config_rejects_unknown_key(tmp_path):
    payload = _small_dynamics_config()
    payload["lead"]["hopping"] = 1.0
    path = _write(tmp_path, payload)
    with pytest.raises(sl.ConfigError, match="unknown key 'hopping' in section 'lead'"):
        cli.parse_config(path, "dynamics")


def test_parse_config_rejects_unknown_section(tmp_path):
    payload = _small_dynamics_config()
    payload["extras"] = {}
    path = _write(tmp_path, payload)
    with pytest.raises(sl.ConfigError, match="unknown key 'extras'"):
        cli.parse_config(path, "dynamics")


def test_parse_config_names_missing_field(tmp_path):
    payload = _small_dynamics_config()
    del payload["packet"]["sigma"]
    path = _write(tmp_path, payload)
    with pytest.raises(sl.ConfigError, match="missing required field 'sigma'"):
        cli.parse_config(path, "dynamics")


def test_parse_config_rejects_contradictory_section(tmp_path):
    payload = _small_dynamics_config()
    payload["scan"] = {"mu_min": 0, "mu_max": 1, "step": 0.1}
    path = _write(tmp_path, payload)
    with pytest.raises(sl.ConfigError, match="contradicts mode 'dynamics'"):
        cli.parse_config(path, "dynamics")


def test_parse_config_rejects_mode_mismatch(tmp_path):
    payload = _small_dynamics_config()
    payload["mode"] = "steady"
    path = _write(tmp_path, payload)
    with pytest.raises(sl.ConfigError, match="declares mode 'steady'"):
        cli.parse_config(path, "dynamics")


def test_parse_config_malformed_file_names_location(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "center": [,]\n}')
    with pytest.raises(sl.ConfigError, match="line 2"):
        cli.parse_config(path, "dynamics")


def test_parse_config_custom_complex_matrix(tmp_path):
    payload = {
        "center": {"type": "custom", "matrix": [[0.0, [0.0, 2.0]], [[0.0, -2.0], 0.0]]},
        "lead": {"J": -0.5, "length": 30},
        "packet": {"center_site": -10, "sigma": 2, "k": 1.2},
    }
    cfg = cli.parse_config(_write(tmp_path, payload), "dynamics")
    np.testing.assert_array_equal(
        cfg.center.matrix, np.array([[0, 2j], [-2j, 0]], dtype=complex)
    )


def test_parse_config_angle_strings(tmp_path):
    payload = _small_dynamics_config()
    payload["packet"]["k"] = "2*pi/5"
    cfg = cli.parse_config(_write(tmp_path, payload), "dynamics")
    assert cfg.packet.k == pytest.approx(2 * np.pi / 5)
    payload["packet"]["k"] = "half pi"
    with pytest.raises(sl.ConfigError, match="packet.k"):
        cli.parse_config(_write(tmp_path, payload), "dynamics")


def test_steady_run_trivial_phase_reflects_everything(tmp_path):
    config = {
        "center": {"type": "ssh", "v": 6.0, "w": 4.0, "cells": 20},
        "lead": {"J": -0.01, "mu": 0.0},
        "steady": {"k": "pi/2"},
    }
    path = _write(tmp_path, config)
    out = tmp_path / "out"
    assert cli.main(["steady", "--config", str(path), "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["r"]["re"] < -0.999
    assert summary["reflectance"] > 0.999
    assert abs(summary["flux_error"]) < 1e-10
    lines = (out / "amplitudes.csv").read_text().splitlines()
    assert lines[0] == CSV_VERSION_LINE
    assert (out / "final_state.svg").exists()


def test_dynamics_run_artifacts_and_determinism(tmp_path):
    path = _write(tmp_path, _small_dynamics_config())
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    for out in (out1, out2):
        assert cli.main(["dynamics", "--config", str(path), "--out", str(out)]) == 0
    for name in ("channels.csv", "trajectory.csv", "snapshots.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    assert (out1 / "trajectory.svg").read_bytes() == (out2 / "trajectory.svg").read_bytes()
    summary = json.loads((out1 / "summary.json").read_text())
    assert summary["channel_probabilities"][1] == pytest.approx(36 / 49, abs=0.02)
    # measured columns carry their theory siblings
    header = (out1 / "channels.csv").read_text().splitlines()[1]
    assert header == "channel,probability,probability_theory"


def test_mu_scan_run(tmp_path):
    config = {
        "center": {"type": "ssh", "v": 2.0, "w": 4.0, "cells": 3},
        "scan": {"mu_min": -6.5, "mu_max": 6.5, "step": 0.002, "alpha": 1, "J": 1.0,
                 "k": "pi/2"},
    }
    out = tmp_path / "out"
    assert cli.main(["mu-scan", "--config", str(_write(tmp_path, config)), "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    vals = np.linalg.eigvalsh(sl.center_matrix(sl.SSHCenter(2.0, 4.0, 3)))
    for mu_star in summary["resonances"]:
        assert np.min(np.abs(vals - mu_star)) < 1e-3
    assert (out / "scan.csv").exists()
    assert (out / "resonances.csv").exists()
    assert (out / "reflection.svg").exists()


def test_q_sweep_run_marks_transition(tmp_path):
    config = {
        "sweep": {"q_values": [0.5, 1.0, 1.5], "w": 4.0, "cells": 2},
        "lead": {"J": -0.1, "mu": 0.0, "length": 40},
        "packet": {"center_site": -15, "sigma": 4, "k": "pi/2"},
    }
    out = tmp_path / "out"
    rc = cli.main(
        ["q-sweep", "--config", str(_write(tmp_path, config)), "--out", str(out),
         "--workers", "1"]
    )
    assert rc == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[1] == (
        "q,status,visibility_measured,visibility_theory,"
        "reflectance_measured,reflectance_theory"
    )
    rows = {line.split(",")[0]: line for line in lines[2:]}
    assert "excluded (transition)" in rows["1"]
    assert rows["1"].split(",")[2] == "nan"
    ok_row = rows["0.5"].split(",")
    assert ok_row[1] == "ok"
    assert float(ok_row[3]) == pytest.approx(0.6)
    assert (out / "sweep.svg").exists()


def test_exit_code_config_error(tmp_path):
    path = tmp_path / "nope.json"
    assert cli.main(["dynamics", "--config", str(path), "--out", str(tmp_path / "o")]) == 2


def test_exit_code_physics_error(tmp_path):
    config = {
        "center": {"type": "ssh", "v": 2.0, "w": 4.0, "cells": 2},
        "lead": {"J": -0.1},
        "steady": {"k": 0.0},
    }
    path = _write(tmp_path, config)
    assert cli.main(["steady", "--config", str(path), "--out", str(tmp_path / "o")]) == 3


def test_exit_code_numerical_error(tmp_path):
    # gain-tuned single site cancels the lead boundary term: singular solve
    config = {
        "center": {"type": "custom", "matrix": [[[0.0, 2.0]]]},
        "lead": {"J": -1.0, "mu": 0.0},
        "steady": {"k": "pi/2"},
    }
    path = _write(tmp_path, config)
    assert cli.main(["steady", "--config", str(path), "--out", str(tmp_path / "o")]) == 4


def test_reproduce_fig_smoke(tmp_path):
    rc = cli.main(
        ["reproduce-fig", "3a", "--out", str(tmp_path), "--snapshot-stride", "220"]
    )
    assert rc == 0
    out = tmp_path / "fig3a"
    summary = json.loads((out / "summary.json").read_text())
    assert summary["channel_probabilities"][0] == pytest.approx(1 / 49, abs=0.01)
    assert (out / "trajectory.svg").exists()


def test_console_entry_point_help():
    proc = subprocess.run(
        [sys.executable, "-m", "scatterlab", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "reproduce-fig" in proc.stdout
