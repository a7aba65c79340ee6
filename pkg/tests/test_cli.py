"""
Tests for the command-line front end: exit statuses, listing and argument errors.
"""

import json
import math

import pytest

from hyperfold import __version__
from hyperfold.cli import main

GEOMETRY = {"a": 2.0, "r": 2.0, "beta": math.pi / 3, "s_interval_offset": -2.5}


def _write_config(tmp_path, payload, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "generic-tilt: beta = pi/3 with Z crossing the domain" in out
    assert out.count("\n") >= 5


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_phase_from_config(tmp_path):
    config = _write_config(tmp_path, {"geometry": GEOMETRY, "grid_n": 16})
    out = tmp_path / "run"
    assert main(["phase", "--config", str(config), "--out", str(out)]) == 0
    assert (out / "phase_surface.csv").exists()
    assert (out / "zero_geometry.json").exists()


def test_bessel_from_scenario(tmp_path, capsys):
    assert main(["bessel", "--scenario", "generic-tilt", "--out", str(tmp_path)]) == 0
    assert "overlap max relative error" in capsys.readouterr().out


def test_invalid_config_exits_1(tmp_path, capsys):
    config = _write_config(tmp_path, {"geometry": {**GEOMETRY, "beta": 3.0}, "T": 1.0})
    assert main(["phase", "--config", str(config), "--out", str(tmp_path)]) == 1
    out = capsys.readouterr().out
    assert "beta out of (0, pi/2]" in out
    assert "T:" in out


def test_missing_config_file_exits_1(tmp_path):
    assert main(["phase", "--config", str(tmp_path / "absent.json")]) == 1


def test_unknown_scenario_exits_1(tmp_path):
    assert main(["phase", "--scenario", "flat-torus", "--out", str(tmp_path)]) == 1


def test_thread_count_must_be_positive(tmp_path):
    assert main(["kernel", "--scenario", "generic-tilt", "--out", str(tmp_path), "--threads", "0"]) == 1


def test_audit_failure_exits_2(tmp_path, capsys):
    payload = {
        "geometry": {"a": 0.5, "r": 1.0, "beta": math.pi / 3, "s_interval_offset": -0.5},
        "grid_n": 32,
    }
    config = _write_config(tmp_path, payload)
    assert main(["bounds", "--config", str(config), "--out", str(tmp_path / "run")]) == 2
    assert "Audit failed: bounds.preconditions" in capsys.readouterr().out


def test_verbose_enables_debug(tmp_path, caplog):
    config = _write_config(tmp_path, {"geometry": GEOMETRY, "grid_n": 16})
    with caplog.at_level("DEBUG", logger="hyperfold"):
        assert main(["phase", "--config", str(config), "--out", str(tmp_path / "run"), "--verbose"]) == 0
    assert any(record.levelname == "DEBUG" for record in caplog.records)


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["phase"],
        ["phase", "--scenario", "generic-tilt", "--config", "x.json"],
        ["shrink", "--scenario", "generic-tilt"],
    ],
)
def test_argument_errors(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2
