"""
Poincare half-space model of H^3: distances, the two geodesic families
and R-tube geometry about the vertical axis.

All functions are pure. Scalar entry points return Python floats; the
``*_arrays`` variants broadcast over numpy arrays for the audits.
"""

import logging
import math

import numpy as np

from hyperfold.exceptions import DomainError
from hyperfold.models.geometry_models import AXIS, AxisGeodesic, CircleGeodesic, Point3, Tube

logger = logging.getLogger(__name__)

# Relative slack on tube boundary comparisons
TUBE_SLACK = 1e-12


# --- distances ---

def arcosh1p(u):
    """arcosh(1 + u) for u >= 0 without cancellation near u = 0."""
    u = np.asarray(u, dtype=float)
    out = np.log1p(u + np.sqrt(u * (u + 2.0)))
    return float(out) if out.ndim == 0 else out


def distance3(p: Point3, q: Point3) -> float:
    """
    Hyperbolic distance between two half-space points.

    Evaluated as arcosh(1 + u) with u = |p - q|^2 / (2 p.z q.z), so that
    nearby points keep full relative accuracy.
    """
    if p.z <= 0.0 or q.z <= 0.0:
        raise DomainError("distance3 needs z > 0 for both points")
    dx = p.x - q.x
    dy = p.y - q.y
    dz = p.z - q.z
    u = (dx * dx + dy * dy + dz * dz) / (2.0 * p.z * q.z)
    return math.log1p(u + math.sqrt(u * (u + 2.0)))


def distance3_arrays(x1, y1, z1, x2, y2, z2) -> np.ndarray:
    """Broadcasting version of distance3 on coordinate arrays."""
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    if np.any(z1 <= 0.0) or np.any(z2 <= 0.0):
        raise DomainError("distance3 needs z > 0 for both points")
    dx = np.asarray(x1, dtype=float) - x2
    dy = np.asarray(y1, dtype=float) - y2
    dz = z1 - z2
    u = (dx * dx + dy * dy + dz * dz) / (2.0 * z1 * z2)
    return np.log1p(u + np.sqrt(u * (u + 2.0)))


# --- geodesics ---

def gamma1(t: float, g: AxisGeodesic = AXIS) -> Point3:
    """Unit-speed axis geodesic t -> (0, 0, e^t)."""
    return g.point(t)


def gamma2(s: float, g: CircleGeodesic) -> Point3:
    """
    Unit-speed half-circle geodesic.

    (1 - e^{2s})/(1 + e^{2s}) = -tanh(s) and 2re^s/(1 + e^{2s}) = r/cosh(s);
    the tanh/cosh forms do not overflow for large |s|.
    """
    th = -math.tanh(s)
    return Point3(
        g.a + th * g.r * g.cos_beta,
        th * g.r * math.sin(g.beta),
        g.r / math.cosh(s),
    )


def gamma2_arrays(s, g: CircleGeodesic) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s = np.asarray(s, dtype=float)
    th = -np.tanh(s)
    return (g.a + th * g.r * g.cos_beta, th * g.r * math.sin(g.beta), g.r / np.cosh(s))


# --- axis distance and tubes ---

def dist_to_axis(p: Point3) -> float:
    """Distance from p to the full axis geodesic: arcosh(sqrt(1 + (x/z)^2 + (y/z)^2))."""
    if p.z <= 0.0:
        raise DomainError("dist_to_axis needs z > 0")
    # arcosh(sqrt(1 + w^2)) == asinh(w)
    return math.asinh(math.hypot(p.x, p.y) / p.z)


def distance_to_gamma1(p: Point3) -> tuple[float, float]:
    """
    Closest point of the axis geodesic to p.

    Returns (t*, distance) with t* = ln sqrt(x^2 + y^2 + z^2), the unique
    minimiser of t -> distance3(p, gamma1(t)).
    """
    t_star = 0.5 * math.log(p.x * p.x + p.y * p.y + p.z * p.z)
    return t_star, distance3(p, gamma1(t_star))


def tube_contains(p: Point3, tube: Tube) -> bool:
    """True iff dist_to_axis(p) <= R."""
    return dist_to_axis(p) <= tube.R * (1.0 + TUBE_SLACK)


def tube_contains_inequality(p: Point3, tube: Tube) -> bool:
    """The half-space form of tube membership: z >= sqrt(x^2 + y^2) / sqrt(cosh^2 R - 1)."""
    # sqrt(cosh^2 R - 1) == sinh R
    return math.hypot(p.x, p.y) <= p.z * math.sinh(tube.R) * (1.0 + TUBE_SLACK)


def tube_quadratic(u: float, g: CircleGeodesic, tube: Tube) -> float:
    """d1^2 u^2 + 2(a^2 + r^2 - 2cosh^2 R r^2) u + d2^2; gamma2(s) is in the tube iff <= 0 at u = e^{2s}."""
    b_lin, d1_sq, d2_sq = _tube_coefficients(g, tube)
    return d1_sq * u * u + 2.0 * b_lin * u + d2_sq


def tube_interval(g: CircleGeodesic, tube: Tube) -> tuple[float, float] | None:
    """
    Range of u = e^{2s} for which gamma2(s) lies in the tube.

    Returns (u_minus, u_plus) with u_plus = inf when d1 = 0, or None when
    the circle geodesic misses the tube.
    """
    interval = solve_tube_quadratic(*_tube_coefficients(g, tube))
    logger.debug("tube_interval a=%g r=%g beta=%g R=%g -> %s", g.a, g.r, g.beta, tube.R, interval)
    return interval


def solve_tube_quadratic(b_lin: float, d1_sq: float, d2_sq: float) -> tuple[float, float] | None:
    """
    Solve d1_sq u^2 + 2 b_lin u + d2_sq <= 0 over u > 0.

    d1_sq = 0 degenerates to a linear inequality with u_plus = inf.
    """
    if b_lin >= 0.0:
        # Both roots are non-positive, no u = e^{2s} > 0 qualifies
        return None
    disc = b_lin * b_lin - d1_sq * d2_sq
    if disc < 0.0:
        return None
    big = -b_lin + math.sqrt(disc)
    # u_minus * u_plus = d2^2 / d1^2, so the small root comes from the large one
    u_minus = d2_sq / big
    u_plus = math.inf if d1_sq == 0.0 else big / d1_sq
    return (u_minus, u_plus)


def _tube_coefficients(g: CircleGeodesic, tube: Tube) -> tuple[float, float, float]:
    cosh_r = math.cosh(tube.R)
    sin_half = math.sin(0.5 * g.beta)
    d1_sq = (g.a - g.r) ** 2 + 4.0 * g.a * g.r * sin_half * sin_half
    d2_sq = (g.a + g.r) ** 2 - 4.0 * g.a * g.r * sin_half * sin_half
    b_lin = g.a * g.a + g.r * g.r - 2.0 * cosh_r * cosh_r * g.r * g.r
    return b_lin, d1_sq, d2_sq
