"""
Scenario configuration: one JSON document per scenario, validated in full
before any run. Every violation is reported, not just the first.
"""

import json
import logging
from typing import Any, Literal, Mapping

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from hyperfold.exceptions import ConfigError
from hyperfold.models.geometry_models import HALF_PI, PhaseParams

logger = logging.getLogger(__name__)

DEFAULT_LAMBDA_GRID = [2.0 ** k for k in range(6, 13)]


class GeometryConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    a: float = Field(ge=0.0, description="Euclidean distance of the circle centre from the vertical axis")
    r: float = Field(description="Euclidean radius of the circle geodesic")
    beta: float = Field(description="Tilt of the circle's vertical plane, in (0, pi/2]")
    s_interval_offset: float = Field(default=0.0, description="I = [offset, offset + 1]")

    @field_validator("r")
    @classmethod
    def _positive_radius(cls, value: float) -> float:
        if not value > 0.0:
            raise ValueError(f"r must be positive, got {value}")
        return value

    @field_validator("beta")
    @classmethod
    def _beta_range(cls, value: float) -> float:
        if not 0.0 < value <= HALF_PI:
            raise ValueError(f"beta out of (0, pi/2]: {value}")
        return value


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)

    geometry: GeometryConfig
    tube_R: float = Field(default=1.0, gt=0.0, description="Radius of the tube around the axis geodesic")
    T: float = Field(default=8.0, ge=2.0, description="Time cutoff; phi must stay in [2, T]")
    epsilon: float = Field(default=0.1, gt=0.0, lt=1.0, description="Width of the neighbourhood of Z")
    lambda_grid: list[float] = Field(default_factory=lambda: list(DEFAULT_LAMBDA_GRID), min_length=1)
    grid_n: int = Field(default=256, ge=16, le=4096)
    fd_step: float | None = Field(default=None, gt=0.0, description="Finite-difference step; None picks per scale")
    seed: int = Field(default=0, ge=0)
    output_dir: str = "out"

    decay_phase: Literal["bilinear", "fold", "separable"] = "bilinear"
    cutoff_shape: Literal["standard-bump"] = "standard-bump"
    law_C: float = Field(default=1.0, gt=0.0, description="C in eps = e^{-CT}/T")
    law_c: float | None = Field(default=None, gt=0.0, description="c in T = c log(lambda); 1/(24 C) when unset")
    composite_lambda: float = Field(default=256.0, gt=0.0)
    kernel_T_grid: list[float] = Field(default_factory=lambda: [8.0, 16.0], min_length=1)
    kernel_lambda_grid: list[float] = Field(default_factory=lambda: [2.0 ** k for k in range(7, 12)], min_length=1)

    @field_validator("lambda_grid", "kernel_lambda_grid", "kernel_T_grid")
    @classmethod
    def _strictly_increasing(cls, values: list[float]) -> list[float]:
        if any(v <= 0.0 for v in values):
            raise ValueError("grid values must be positive")
        if any(hi <= lo for lo, hi in zip(values[:-1], values[1:])):
            raise ValueError("grid must be strictly increasing")
        return values

    def phase_params(self) -> PhaseParams:
        g = self.geometry
        return PhaseParams(a=g.a, r=g.r, beta=g.beta, s_offset=g.s_interval_offset)


def _format_error(error: dict) -> str:
    location = ".".join(str(part) for part in error["loc"]) or "config"
    return f"{location}: {error['msg']}"


def validate_config(raw: str | bytes | Mapping[str, Any]) -> tuple[ScenarioConfig, list[str]]:
    """
    Parse and validate a scenario. Returns (config, warnings); raises
    ConfigError carrying every violation.
    """
    if isinstance(raw, (str, bytes)):
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"invalid JSON: {exc}"]) from exc
    else:
        data = dict(raw)
    if not isinstance(data, dict):
        raise ConfigError(["config must be a JSON object"])

    warnings = []
    if "lambda_grid" not in data:
        warnings.append("lambda_grid missing; defaulted to 2^6..2^12")

    try:
        config = ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        errors = [_format_error(error) for error in exc.errors()]
        logger.error("Config validation failed with %d errors", len(errors))
        raise ConfigError(errors) from exc

    for message in warnings:
        logger.warning("%s", message)
    return config, warnings
