"""
ScenarioRegistry: the built-in named scenarios and their expected audit outcomes.

Every geometry below keeps phi inside [2, T] on [0,1] x I for T = 8 and
passes the tube proxy with R = 1.
"""

import copy
import math

from hyperfold.models.config_models import ScenarioConfig, validate_config

_DYADIC_6_14 = [2.0 ** k for k in range(6, 15)]

_SCENARIO_DATA = {
    "nondegenerate": {
        "description": "Z nonempty but away from [0,1] x I; bilinear decay model",
        "config": {
            "geometry": {"a": 1.0, "r": 4.0, "beta": math.pi / 3, "s_interval_offset": 2.5},
            "lambda_grid": _DYADIC_6_14,
            "decay_phase": "bilinear",
        },
        "expected": {"zero_set_empty": False, "zero_set_crosses": False, "sigma": (0.45, 0.55), "proof_case": "II(i)"},
    },
    "fold-model": {
        "description": "beta = pi/4 with Z nearly parallel to the s axis, all LeftFold; (t - 1/2)^2 s decay",
        "config": {
            "geometry": {"a": 1.5, "r": 2.0, "beta": math.pi / 4, "s_interval_offset": -3.0},
            "lambda_grid": _DYADIC_6_14,
            "decay_phase": "fold",
        },
        "expected": {"zero_set_empty": False, "zero_set_crosses": True, "sigma": (0.20, 0.30), "proof_case": "II(i)"},
    },
    "beta-right-angle": {
        "description": "beta = pi/2: Z is the cross t = ln d1, s = 0 with its vertex inside the square",
        "config": {
            "geometry": {"a": 1.6, "r": 0.4, "beta": math.pi / 2, "s_interval_offset": -0.5},
            "lambda_grid": _DYADIC_6_14,
        },
        "expected": {"zero_set_empty": False, "zero_set_crosses": True, "sigma": (0.45, 0.55), "proof_case": "II(i)"},
    },
    "generic-tilt": {
        "description": "beta = pi/3 with Z crossing the domain",
        "config": {
            "geometry": {"a": 2.0, "r": 2.0, "beta": math.pi / 3, "s_interval_offset": -2.5},
            "lambda_grid": _DYADIC_6_14,
        },
        "expected": {"zero_set_empty": False, "zero_set_crosses": True, "sigma": (0.45, 0.55), "proof_case": "II(i)"},
    },
    "no-zero-set": {
        "description": "r < a cos beta: phi_st never vanishes",
        "config": {
            "geometry": {"a": 1.5, "r": 0.5, "beta": math.pi / 3, "s_interval_offset": -2.5},
            "lambda_grid": _DYADIC_6_14,
        },
        "expected": {"zero_set_empty": True, "zero_set_crosses": False, "sigma": (0.45, 0.55), "proof_case": "I"},
    },
}

SIGMA_RANGES = {
    "bilinear": (0.45, 0.55),
    "fold": (0.20, 0.30),
    "separable": (-0.05, 0.05),
}


class ScenarioRegistry:
    """Lookups over the built-in scenarios; validated configs are cached."""

    def __init__(self):
        self._data = _SCENARIO_DATA
        self._configs: dict[str, ScenarioConfig] = {}

    def names(self) -> list[str]:
        return sorted(self._data)

    def description(self, name: str) -> str:
        return self._entry(name)["description"]

    def raw(self, name: str) -> dict:
        """A deep copy of the scenario's config document."""
        return copy.deepcopy(self._entry(name)["config"])

    def get(self, name: str) -> ScenarioConfig:
        if name not in self._configs:
            config, _ = validate_config(self.raw(name))
            self._configs[name] = config
        return self._configs[name]

    def expected(self, name: str) -> dict:
        return dict(self._entry(name)["expected"])

    def _entry(self, name: str) -> dict:
        try:
            return self._data[name]
        except KeyError:
            raise KeyError(f"unknown scenario {name!r}; known: {', '.join(self.names())}") from None


scenario_registry = ScenarioRegistry()
