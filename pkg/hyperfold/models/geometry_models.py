"""
Geometric value types for the Poincare half-space model of H^3.

Points, the two geodesic families, R-tubes, the phase parameters of a
geodesic pair and the zero-set geometry of the mixed derivative.
All types are immutable and validated at construction.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

from hyperfold.exceptions import DomainError

HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class Point3:
    """A point (x, y, z) of the upper half-space, z > 0."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not self.z > 0.0:
            raise DomainError(f"half-space point needs z > 0, got z={self.z!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class AxisGeodesic:
    """The canonical geodesic t -> (0, 0, e^t)."""

    def point(self, t: float) -> Point3:
        return Point3(0.0, 0.0, math.exp(t))


AXIS = AxisGeodesic()


@dataclass(frozen=True)
class CircleGeodesic:
    """
    Half-circle geodesic of Euclidean radius r centred at (a, 0, 0),
    lying in the vertical plane tilted by beta from the x-axis.

    Callers pass canonical parameters: a >= 0, r > 0, beta in (0, pi/2].
    """

    a: float
    r: float
    beta: float

    def __post_init__(self):
        _check_canonical(self.a, self.r, self.beta)

    @property
    def cos_beta(self) -> float:
        return _cos_beta(self.beta)


@dataclass(frozen=True)
class Tube:
    """R-tube about the axis geodesic."""

    R: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.R) and self.R > 0.0):
            raise DomainError(f"tube radius must be positive, got R={self.R!r}")


@dataclass(frozen=True)
class PhaseParams:
    """
    Parameters of the geodesic pair (gamma1, gamma2) and the unit interval I
    of the s variable. d1, d2 are the derived distances of the phase formula.
    """

    a: float
    r: float
    beta: float
    s_offset: float = 0.0

    def __post_init__(self):
        _check_canonical(self.a, self.r, self.beta)
        if not math.isfinite(self.s_offset):
            raise DomainError(f"s_interval offset must be finite, got {self.s_offset!r}")

    @classmethod
    def from_geodesic(cls, g: CircleGeodesic, s_offset: float = 0.0) -> "PhaseParams":
        return cls(a=g.a, r=g.r, beta=g.beta, s_offset=s_offset)

    @property
    def geodesic(self) -> CircleGeodesic:
        return CircleGeodesic(self.a, self.r, self.beta)

    @property
    def cos_beta(self) -> float:
        return _cos_beta(self.beta)

    @property
    def sin_beta(self) -> float:
        return math.sin(self.beta)

    @property
    def d1_sq(self) -> float:
        # (a - r)^2 + 4ar sin^2(beta/2) stays accurate when a ~ r and beta ~ 0
        return (self.a - self.r) ** 2 + 4.0 * self.a * self.r * math.sin(0.5 * self.beta) ** 2

    @property
    def d2_sq(self) -> float:
        return (self.a + self.r) ** 2 - 4.0 * self.a * self.r * math.sin(0.5 * self.beta) ** 2

    @property
    def d1(self) -> float:
        return math.sqrt(self.d1_sq)

    @property
    def d2(self) -> float:
        return math.sqrt(self.d2_sq)

    @property
    def s_interval(self) -> tuple[float, float]:
        return (self.s_offset, self.s_offset + 1.0)


class RegionLabel(str, Enum):
    """The four parts of the decomposition of [0,1] x I."""

    NON_STATIONARY = "NonStationary"
    LEFT_FOLD = "LeftFold"
    RIGHT_FOLD = "RightFold"
    YOUNG_PART = "YoungPart"


@dataclass(frozen=True)
class ZeroSetGeometry:
    """
    Geometry of Z = {(e^{2t} - X0)(e^{2s} - Y0) = B}, the zero set of phi_st.

    When ``empty`` is true (r <= a cos beta) the numeric fields are NaN.
    Asymptotes are ordered (l1, l2, l3, l4): the two vertical lines
    t = ln sqrt(X0), t = ln sqrt(X0 - B/Y0), then the two horizontal lines
    s = ln sqrt(Y0), s = ln sqrt(Y0 - B/X0).
    """

    X0: float
    Y0: float
    B: float
    t_plus: float
    t_minus: float
    s_plus: float
    s_minus: float
    asymptotes: tuple[float, float, float, float]
    empty: bool
    d2_sq: float = field(default=math.nan)

    def to_dict(self) -> dict:
        def _clean(v: float):
            return None if math.isnan(v) else v

        return {
            "empty": self.empty,
            "X0": _clean(self.X0),
            "Y0": _clean(self.Y0),
            "B": _clean(self.B),
            "t_plus": _clean(self.t_plus),
            "t_minus": _clean(self.t_minus),
            "s_plus": _clean(self.s_plus),
            "s_minus": _clean(self.s_minus),
            "asymptotes": [_clean(v) for v in self.asymptotes],
        }


# --- validation helpers ---

def _cos_beta(beta: float) -> float:
    # cos(pi/2) is 6e-17 in floating point; the right angle must give an exact 0
    return 0.0 if beta == HALF_PI else math.cos(beta)


def _check_canonical(a: float, r: float, beta: float):
    problems = []
    if not (math.isfinite(a) and a >= 0.0):
        problems.append(f"a must be finite and >= 0, got {a!r}")
    if not (math.isfinite(r) and r > 0.0):
        problems.append(f"r must be finite and > 0, got {r!r}")
    if not (math.isfinite(beta) and 0.0 < beta <= HALF_PI):
        problems.append(f"beta out of (0, pi/2], got {beta!r}")
    if problems:
        raise DomainError("; ".join(problems))
