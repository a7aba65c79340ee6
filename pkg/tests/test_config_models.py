"""
Tests for scenario validation and the built-in scenario registry.
"""

import json
import math

import numpy as np
import pytest

from hyperfold.exceptions import ConfigError
from hyperfold.models.config_models import DEFAULT_LAMBDA_GRID, ScenarioConfig, validate_config
from hyperfold.services import phase_audits
from hyperfold.services import phase_function as pf
from hyperfold.services import zero_set as zs
from hyperfold.services.scenario_registry import SIGMA_RANGES, scenario_registry

GEOMETRY = {"a": 2.0, "r": 2.0, "beta": math.pi / 3, "s_interval_offset": -2.5}


class TestValidateConfig:
    def test_minimal_document(self):
        config, warnings = validate_config({"geometry": GEOMETRY})
        assert isinstance(config, ScenarioConfig)
        assert config.T == 8.0
        assert config.epsilon == 0.1
        assert config.lambda_grid == DEFAULT_LAMBDA_GRID
        assert warnings == ["lambda_grid missing; defaulted to 2^6..2^12"]

    def test_json_text(self):
        raw = json.dumps({"geometry": GEOMETRY, "lambda_grid": [64, 128, 256, 512, 1024], "seed": 7})
        config, warnings = validate_config(raw)
        assert warnings == []
        assert config.seed == 7
        p = config.phase_params()
        assert (p.a, p.r, p.beta, p.s_offset) == (2.0, 2.0, math.pi / 3, -2.5)

    def test_every_violation_is_reported(self):
        raw = {"geometry": {**GEOMETRY, "beta": 3.0, "r": -1.0}, "T": 1.0, "epsilon": 1.5}
        with pytest.raises(ConfigError) as info:
            validate_config(raw)
        errors = info.value.errors
        assert len(errors) == 4
        assert any(e.startswith("geometry.beta:") and "beta out of (0, pi/2]: 3.0" in e for e in errors)
        assert any(e.startswith("geometry.r:") for e in errors)
        assert any(e.startswith("T:") for e in errors)
        assert any(e.startswith("epsilon:") for e in errors)

    def test_unknown_keys_are_rejected(self):
        with pytest.raises(ConfigError) as info:
            validate_config({"geometry": {**GEOMETRY, "tilt": 1.0}, "speed": 2})
        locations = {e.split(":")[0] for e in info.value.errors}
        assert locations == {"geometry.tilt", "speed"}

    def test_nan_is_rejected(self):
        raw = '{"geometry": {"a": NaN, "r": 1.0, "beta": 1.0}}'
        with pytest.raises(ConfigError) as info:
            validate_config(raw)
        assert any(e.startswith("geometry.a:") for e in info.value.errors)

    def test_grids_must_increase(self):
        with pytest.raises(ConfigError, match="strictly increasing"):
            validate_config({"geometry": GEOMETRY, "lambda_grid": [128.0, 64.0]})
        with pytest.raises(ConfigError, match="positive"):
            validate_config({"geometry": GEOMETRY, "kernel_T_grid": [-1.0, 8.0]})

    def test_decay_phase_choices(self):
        with pytest.raises(ConfigError):
            validate_config({"geometry": GEOMETRY, "decay_phase": "cubic"})
        config, _ = validate_config({"geometry": GEOMETRY, "decay_phase": "fold"})
        assert config.decay_phase == "fold"

    def test_malformed_input(self):
        with pytest.raises(ConfigError, match="invalid JSON"):
            validate_config("{geometry: ")
        with pytest.raises(ConfigError, match="JSON object"):
            validate_config("[1, 2, 3]")


class TestScenarioRegistry:
    def test_names(self):
        assert scenario_registry.names() == [
            "beta-right-angle", "fold-model", "generic-tilt", "no-zero-set", "nondegenerate",
        ]

    def test_unknown_scenario(self):
        with pytest.raises(KeyError, match="known:"):
            scenario_registry.get("hyperbolic-cow")

    def test_raw_is_a_copy(self):
        raw = scenario_registry.raw("generic-tilt")
        raw["geometry"]["a"] = 99.0
        assert scenario_registry.raw("generic-tilt")["geometry"]["a"] == 2.0

    def test_configs_are_cached(self):
        assert scenario_registry.get("nondegenerate") is scenario_registry.get("nondegenerate")

    @pytest.mark.parametrize("name", scenario_registry.names())
    def test_expected_zero_set(self, name):
        config = scenario_registry.get(name)
        expected = scenario_registry.expected(name)
        p = config.phase_params()
        assert zs.zero_geometry(p).empty is expected["zero_set_empty"]

        tt, ss = phase_audits.audit_grid(p, 65)
        mixed = pf.phi_st_array(tt, ss, p)
        scale = pf.phi_st_scale(tt, ss, p)
        clear = np.abs(mixed) > 1e-9 * scale
        crosses = bool(np.any(mixed[clear] < 0.0) and np.any(mixed[clear] > 0.0))
        assert crosses is expected["zero_set_crosses"]

    @pytest.mark.parametrize("name", scenario_registry.names())
    def test_expected_proof_case(self, name):
        config = scenario_registry.get(name)
        p = config.phase_params()
        assert phase_audits.proof_case(p, config.T, config.tube_R) == scenario_registry.expected(name)["proof_case"]

    @pytest.mark.parametrize("name", scenario_registry.names())
    def test_sigma_range_matches_decay_phase(self, name):
        config = scenario_registry.get(name)
        assert tuple(scenario_registry.expected(name)["sigma"]) == SIGMA_RANGES[config.decay_phase]

    def test_geometries_are_distinct(self):
        geometries = {tuple(sorted(scenario_registry.raw(name)["geometry"].items())) for name in scenario_registry.names()}
        assert len(geometries) == len(scenario_registry.names())

    @pytest.mark.parametrize("name", scenario_registry.names())
    def test_builtin_scenarios_are_admissible(self, name):
        config = scenario_registry.get(name)
        report = phase_audits.check_preconditions(config.phase_params(), config.T, 64, config.tube_R)
        assert 2.0 <= report.phi_min <= report.phi_max <= config.T

    def test_decay_grids_span_the_full_range(self):
        for name in scenario_registry.names():
            assert scenario_registry.get(name).lambda_grid == [2.0 ** k for k in range(6, 15)]

    def test_fold_model_neighbourhood_is_left_fold(self):
        config = scenario_registry.get("fold-model")
        p = config.phase_params()
        tt, ss = phase_audits.audit_grid(p, 65)
        labels = {label.value for label in zs.classify_grid(tt, ss, p, config.epsilon).flat}
        assert labels == {"NonStationary", "LeftFold"}
        t_c, _ = zs.critical_curves(p)
        # t_c(s) = 0.5 ln(X0 + B / (e^{2s} - Y0)) drifts by under 0.003 across I
        assert t_c(p.s_interval[0]) == pytest.approx(0.584340, abs=1e-5)
        assert t_c(p.s_interval[1]) == pytest.approx(0.581810, abs=1e-5)
