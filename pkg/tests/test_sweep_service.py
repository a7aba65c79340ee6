"""
Tests for the subcommand runners: products, exit statuses and
determinism across runs and thread counts.
"""

import csv
import json
import math

import pytest

from hyperfold.models.config_models import validate_config
from hyperfold.services import sweep_service as sweep
from hyperfold.services.scenario_registry import scenario_registry


def _scenario(name: str, **overrides):
    return scenario_registry.get(name).model_copy(update=overrides)


def _read_csv(path):
    with path.open(newline="", encoding="utf-8") as f:
        return list(csv.reader(f))


@pytest.fixture
def bad_geometry():
    config, _ = validate_config({
        "geometry": {"a": 0.5, "r": 1.0, "beta": math.pi / 3, "s_interval_offset": -0.5},
        "lambda_grid": [64.0, 128.0, 256.0, 512.0, 1024.0],
        "grid_n": 32,
    })
    return config


class TestPhase:
    def test_products(self, tmp_path):
        result = sweep.run_subcommand("phase", _scenario("generic-tilt", grid_n=16), tmp_path)
        assert result.status == sweep.EXIT_OK
        rows = _read_csv(tmp_path / "phase_surface.csv")
        assert tuple(rows[0]) == sweep.PHASE_HEADER
        assert len(rows) == 1 + 16 * 16
        assert {row[4] for row in rows[1:]} <= {"NonStationary", "LeftFold", "RightFold", "YoungPart"}
        geometry = json.loads((tmp_path / "zero_geometry.json").read_text())
        assert geometry["empty"] is False
        assert geometry["X0"] == pytest.approx(12.0)

    def test_empty_zero_set_flag(self, tmp_path):
        result = sweep.run_subcommand("phase", _scenario("no-zero-set", grid_n=16), tmp_path)
        assert result.status == sweep.EXIT_OK
        geometry = json.loads((tmp_path / "zero_geometry.json").read_text())
        assert geometry["empty"] is True
        assert geometry["asymptotes"] == [None, None, None, None]
        assert result.outcomes == []

    def test_repeated_runs_are_byte_identical(self, tmp_path):
        config = _scenario("beta-right-angle", grid_n=24)
        sweep.run_subcommand("phase", config, tmp_path / "a")
        sweep.run_subcommand("phase", config, tmp_path / "b")
        for name in ("phase_surface.csv", "zero_geometry.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_output_dir_defaults_to_config(self, tmp_path):
        config = _scenario("generic-tilt", grid_n=16, output_dir=str(tmp_path / "from-config"))
        sweep.run_subcommand("phase", config)
        assert (tmp_path / "from-config" / "phase_surface.csv").exists()


class TestOutcomes:
    def test_derivative_cross_check(self):
        outcome = sweep.derivative_outcome(_scenario("nondegenerate"))
        assert outcome.passed
        assert outcome.measured <= sweep.DERIVATIVE_RTOL

    def test_relation_cross_check(self):
        outcome = sweep.relation_outcome()
        assert outcome.passed

    def test_bessel(self, tmp_path):
        result = sweep.run_subcommand("bessel", _scenario("generic-tilt"), tmp_path)
        assert result.status == sweep.EXIT_OK
        assert result.message.startswith("J1 series/asymptotic overlap max relative error:")

    def test_bounds(self, tmp_path):
        result = sweep.run_subcommand("bounds", _scenario("generic-tilt", grid_n=48), tmp_path)
        assert result.status == sweep.EXIT_OK, [o for o in result.outcomes if not o.passed]
        lemma1 = _read_csv(tmp_path / "lemma1_audit.csv")
        assert tuple(lemma1[0]) == sweep.LEMMA1_HEADER
        # NonStationary, LeftFold and RightFold at eps and eps/2
        assert len(lemma1) == 1 + 2 * 3
        left = [row for row in lemma1[1:] if row[1] == "LeftFold"]
        assert all(int(row[4]) > 0 and int(row[5]) >= int(row[4]) for row in left)
        assert not any(".coverage." in o.name for o in result.outcomes)
        lemma2 = _read_csv(tmp_path / "lemma2_audit.csv")
        assert len(lemma2) == 1 + 6

    def test_precondition_failure_is_an_audit_failure(self, tmp_path, bad_geometry):
        result = sweep.run_subcommand("bounds", bad_geometry, tmp_path)
        assert result.status == sweep.EXIT_AUDIT
        assert result.outcomes[0].name == "bounds.preconditions"
        assert "< 2" in result.outcomes[0].details

    def test_composite_precondition_failure(self, tmp_path, bad_geometry):
        result = sweep.run_subcommand("composite", bad_geometry, tmp_path)
        assert result.status == sweep.EXIT_AUDIT

    def test_decay_separable(self, tmp_path):
        config = _scenario("generic-tilt", decay_phase="separable", lambda_grid=[2.0 ** k for k in range(6, 11)])
        result = sweep.run_subcommand("decay", config, tmp_path)
        assert result.status == sweep.EXIT_OK
        fit = json.loads((tmp_path / "fit.json").read_text())
        assert fit["phase"] == "separable"
        assert abs(fit["sigma"]) <= 0.05
        assert len(_read_csv(tmp_path / "decay.csv")) == 1 + len(config.lambda_grid)

    def test_unknown_subcommand(self, tmp_path):
        with pytest.raises(KeyError):
            sweep.run_subcommand("teleport", _scenario("generic-tilt"), tmp_path)


class TestKernel:
    def test_threads_do_not_change_the_products(self, tmp_path):
        config = _scenario("generic-tilt", kernel_T_grid=[4.0, 8.0], kernel_lambda_grid=[16.0, 32.0])
        sweep.run_subcommand("kernel", config, tmp_path / "one", threads=1)
        sweep.run_subcommand("kernel", config, tmp_path / "many", threads=4)
        one = (tmp_path / "one" / "kalpha.csv").read_bytes()
        assert one == (tmp_path / "many" / "kalpha.csv").read_bytes()
        rows = _read_csv(tmp_path / "one" / "kalpha.csv")
        assert tuple(rows[0]) == sweep.KERNEL_HEADER
        # r = 1..8, kept where r <= T
        assert len(rows) == 1 + 2 * (4 + 8)


@pytest.mark.slow
class TestFullAudit:
    @pytest.mark.parametrize("name", ["nondegenerate", "generic-tilt"])
    def test_builtin_scenarios_pass(self, tmp_path, name):
        result = sweep.run_subcommand("audit", scenario_registry.get(name), tmp_path, threads=4)
        assert result.status == sweep.EXIT_OK, [o.name for o in result.outcomes if not o.passed]
        rows = _read_csv(tmp_path / "audit_outcomes.csv")
        assert tuple(rows[0]) == sweep.AUDIT_HEADER
        assert len(rows) == 1 + len(result.outcomes)
