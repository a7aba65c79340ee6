"""
Shared fixtures: the pinned geometries of the built-in scenarios, one
cutoff pair per session and a seeded generator.
"""

import logging
import math

import numpy as np
import pytest

from hyperfold.models.geometry_models import HALF_PI, PhaseParams
from hyperfold.services import wave_kernel as wk

PINNED = {
    "nondegenerate": PhaseParams(a=1.0, r=4.0, beta=math.pi / 3, s_offset=2.5),
    "right_angle": PhaseParams(a=1.6, r=0.4, beta=HALF_PI, s_offset=-0.5),
    "generic_tilt": PhaseParams(a=2.0, r=2.0, beta=math.pi / 3, s_offset=-2.5),
    "no_zero_set": PhaseParams(a=1.5, r=0.5, beta=math.pi / 3, s_offset=-2.5),
}


@pytest.fixture
def nondegenerate() -> PhaseParams:
    return PINNED["nondegenerate"]


@pytest.fixture
def right_angle() -> PhaseParams:
    return PINNED["right_angle"]


@pytest.fixture
def generic_tilt() -> PhaseParams:
    return PINNED["generic_tilt"]


@pytest.fixture
def no_zero_set() -> PhaseParams:
    return PINNED["no_zero_set"]


@pytest.fixture(params=sorted(PINNED))
def pinned(request) -> PhaseParams:
    return PINNED[request.param]


@pytest.fixture(scope="session")
def cutoffs() -> wk.CutoffPair:
    return wk.make_cutoffs("standard-bump")


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(autouse=True)
def _reset_hyperfold_logging():
    """The CLI installs a stdout handler bound to the capture of the running test."""
    yield
    logger = logging.getLogger("hyperfold")
    for handler in list(logger.handlers):
        if getattr(handler, "_hyperfold", False):
            logger.removeHandler(handler)
