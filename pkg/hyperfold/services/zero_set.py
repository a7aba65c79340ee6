"""
Zero set Z of the mixed derivative phi_st and the four-part decomposition
of [0,1] x I built around it.

With c = a cos(beta) and r > c,
    Y0 = (r + c) / (r - c),   X0 = d1^2 Y0,   B = 4 a^3 r cos(b) sin^2(b) / (r - c)^2
and the bracket numerator of phi_st equals (c - r) F(t, s) with
    F(t, s) = (e^{2t} - X0)(e^{2s} - Y0) - B,   X0 Y0 - B = d2^2.
Z is empty when r <= c.
"""

import logging
import math
from typing import Callable

import numpy as np

from hyperfold.exceptions import DomainError
from hyperfold.models.geometry_models import PhaseParams, RegionLabel, ZeroSetGeometry

logger = logging.getLogger(__name__)

_NEWTON_STEPS = 5

_NAN4 = (math.nan, math.nan, math.nan, math.nan)


def zero_geometry(p: PhaseParams) -> ZeroSetGeometry:
    """X0, Y0, B, the vertices (t+-, s+-) and the four asymptotes of Z."""
    c = p.a * p.cos_beta
    if p.r <= c:
        return ZeroSetGeometry(
            X0=math.nan, Y0=math.nan, B=math.nan,
            t_plus=math.nan, t_minus=math.nan, s_plus=math.nan, s_minus=math.nan,
            asymptotes=_NAN4, empty=True, d2_sq=p.d2_sq,
        )

    gap = p.r - c
    y0 = (p.r + c) / gap
    x0 = p.d1_sq * y0
    b = 4.0 * p.a ** 3 * p.r * p.cos_beta * p.sin_beta ** 2 / (gap * gap)
    d2_sq = p.d2_sq

    root_t = math.sqrt(b * x0 / y0)
    root_s = math.sqrt(b * y0 / x0)
    # e^{2t-} = X0 - root_t rewritten through X0 Y0 - B = d2^2 to avoid cancellation
    e2t_minus = x0 * d2_sq / (y0 * (x0 + root_t))
    e2s_minus = y0 * d2_sq / (x0 * (y0 + root_s))

    geometry = ZeroSetGeometry(
        X0=x0,
        Y0=y0,
        B=b,
        t_plus=0.5 * math.log(x0 + root_t),
        t_minus=0.5 * math.log(e2t_minus),
        s_plus=0.5 * math.log(y0 + root_s),
        s_minus=0.5 * math.log(e2s_minus),
        asymptotes=(
            0.5 * math.log(x0),
            0.5 * math.log(d2_sq / y0),
            0.5 * math.log(y0),
            0.5 * math.log(d2_sq / x0),
        ),
        empty=False,
        d2_sq=d2_sq,
    )
    logger.debug("zero_geometry a=%g r=%g beta=%g -> X0=%g Y0=%g B=%g", p.a, p.r, p.beta, x0, y0, b)
    return geometry


def zero_function(t, s, z: ZeroSetGeometry):
    """F(t, s) = (e^{2t} - X0)(e^{2s} - Y0) - B."""
    return (np.exp(2.0 * np.asarray(t, float)) - z.X0) * (np.exp(2.0 * np.asarray(s, float)) - z.Y0) - z.B


def _zero_gradient(t, s, z: ZeroSetGeometry):
    e2t = np.exp(2.0 * t)
    e2s = np.exp(2.0 * s)
    return 2.0 * e2t * (e2s - z.Y0), 2.0 * e2s * (e2t - z.X0)


# --- critical curves ---

def critical_curves(p: PhaseParams) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """
    The branches of Z as graphs: t_c(s) for s outside [s-, s+] and
    s_c(t) for t outside [t-, t+].
    """
    z = zero_geometry(p)
    if z.empty:
        raise DomainError("critical curves need a nonempty zero set (r > a cos beta)")

    def t_c(s: float) -> float:
        if z.s_minus <= s <= z.s_plus:
            raise DomainError(f"s={s!r} lies in the vertex band [{z.s_minus}, {z.s_plus}]")
        arg = z.X0 + z.B / math.expm1(2.0 * s - math.log(z.Y0)) / z.Y0
        if arg <= 0.0:
            raise DomainError(f"t_c undefined at s={s!r}")
        return 0.5 * math.log(arg)

    def s_c(t: float) -> float:
        if z.t_minus <= t <= z.t_plus:
            raise DomainError(f"t={t!r} lies in the vertex band [{z.t_minus}, {z.t_plus}]")
        arg = z.Y0 + z.B / math.expm1(2.0 * t - math.log(z.X0)) / z.X0
        if arg <= 0.0:
            raise DomainError(f"s_c undefined at t={t!r}")
        return 0.5 * math.log(arg)

    return t_c, s_c


def critical_t_array(s, z: ZeroSetGeometry) -> np.ndarray:
    """t_c(s) on an array; NaN inside the vertex band."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = z.X0 + z.B / np.expm1(2.0 * s - math.log(z.Y0)) / z.Y0
        out = 0.5 * np.log(arg)
    return np.where((s >= z.s_minus) & (s <= z.s_plus) | ~(arg > 0.0), np.nan, out)


def critical_s_array(t, z: ZeroSetGeometry) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        arg = z.Y0 + z.B / np.expm1(2.0 * t - math.log(z.X0)) / z.X0
        out = 0.5 * np.log(arg)
    return np.where((t >= z.t_minus) & (t <= z.t_plus) | ~(arg > 0.0), np.nan, out)


# --- restriction to diagonals s - t = delta ---

def restriction_roots(delta: float, p: PhaseParams) -> tuple[float, float]:
    """
    Roots (e^{2 tau-}, e^{2 tau+}) of the bracket numerator restricted to s - t = delta.

    2 e^{2 tau+-} = X0 + Y0 e^{-2 delta} +- sqrt((X0 - Y0 e^{-2 delta})^2 + 4 B e^{-2 delta}).
    """
    z = zero_geometry(p)
    if z.empty:
        raise DomainError("restriction roots need a nonempty zero set")
    w = math.exp(-2.0 * delta)
    big = 0.5 * (z.X0 + z.Y0 * w + math.sqrt((z.X0 - z.Y0 * w) ** 2 + 4.0 * z.B * w))
    # product of the roots is d2^2 e^{-2 delta}
    return (z.d2_sq * w / big, big)


def restriction_factorization(t, delta: float, p: PhaseParams):
    """(c - r) e^{2 delta} (e^{2t} - e^{2 tau-})(e^{2t} - e^{2 tau+}), equal to the numerator on s = t + delta."""
    small, big = restriction_roots(delta, p)
    e2t = np.exp(2.0 * np.asarray(t, float))
    c = p.a * p.cos_beta
    out = (c - p.r) * math.exp(2.0 * delta) * (e2t - small) * (e2t - big)
    return float(out) if np.ndim(out) == 0 else out


# --- epsilon neighbourhood and region thresholds ---

def eps0(p: PhaseParams, eps: float) -> float:
    """eps0 = (1/2) ln(1 + sqrt(B / (X0 Y0))) + eps."""
    z = zero_geometry(p)
    if z.empty:
        raise DomainError("eps0 needs a nonempty zero set")
    return 0.5 * math.log1p(math.sqrt(z.B / (z.X0 * z.Y0))) + eps


def fold_thresholds(p: PhaseParams, eps: float) -> dict[str, float]:
    """
    Thresholds on e^{2s} and e^{2t} for the fold parts:
        s > s+ + eps  <=>  e^{2s} > Y0 e^{2 eps0}
        s < s- - eps  <=>  e^{2s} < (Y0 - B/X0) e^{-2 eps0}
    and the same with (X0, Y0) swapped for t.
    """
    z = zero_geometry(p)
    e0 = eps0(p, eps)
    grow = math.exp(2.0 * e0)
    return {
        "s_upper": z.Y0 * grow,
        "s_lower": (z.d2_sq / z.X0) / grow,
        "t_upper": z.X0 * grow,
        "t_lower": (z.d2_sq / z.Y0) / grow,
    }


def distance_to_zero_set(t, s, z: ZeroSetGeometry, eps: float) -> np.ndarray:
    """
    Distance from (t, s) to Z: first order |F| / |grad F|, refined by
    Gauss-Newton projection onto Z for points within 2 eps.
    """
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    t, s = np.broadcast_arrays(t, s)
    f = zero_function(t, s, z)
    gt, gs = _zero_gradient(t, s, z)
    gnorm = np.hypot(gt, gs)
    with np.errstate(divide="ignore", invalid="ignore"):
        dist = np.abs(f) / gnorm
    dist = np.where(f == 0.0, 0.0, dist)

    # Critical point of F: fall back to the distance to the vertices
    flat = (gnorm == 0.0) & (f != 0.0)
    if flat.any():
        to_vertex = np.minimum(
            np.hypot(t - z.t_plus, s - z.s_plus),
            np.hypot(t - z.t_minus, s - z.s_minus),
        )
        dist = np.where(flat, to_vertex, dist)

    near = (dist <= 2.0 * eps) & (f != 0.0) & ~flat
    if near.any():
        tn = t[near].copy()
        sn = s[near].copy()
        for _ in range(_NEWTON_STEPS):
            fn = zero_function(tn, sn, z)
            gtn, gsn = _zero_gradient(tn, sn, z)
            g2 = gtn * gtn + gsn * gsn
            step = np.where(g2 > 0.0, fn / np.where(g2 > 0.0, g2, 1.0), 0.0)
            tn = tn - step * gtn
            sn = sn - step * gsn
        refined = np.hypot(tn - t[near], sn - s[near])
        dist = dist.copy()
        dist[near] = refined
    return dist


REGION_ORDER: tuple[RegionLabel, ...] = tuple(RegionLabel)
REGION_CODE: dict[RegionLabel, int] = {label: code for code, label in enumerate(REGION_ORDER)}


def region_codes(t, s, p: PhaseParams, eps: float) -> np.ndarray:
    """Integer region codes (indices into REGION_ORDER) on broadcast arrays of t and s."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps!r}")
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    t, s = np.broadcast_arrays(t, s)
    codes = np.full(t.shape, REGION_CODE[RegionLabel.NON_STATIONARY], dtype=np.int8)

    z = zero_geometry(p)
    if z.empty:
        return codes

    in_zeps = distance_to_zero_set(t, s, z, eps) <= eps
    th = fold_thresholds(p, eps)
    e2s = np.exp(2.0 * s)
    e2t = np.exp(2.0 * t)
    left = (e2s > th["s_upper"]) | (e2s < th["s_lower"])
    right = (e2t > th["t_upper"]) | (e2t < th["t_lower"])

    codes[in_zeps & left] = REGION_CODE[RegionLabel.LEFT_FOLD]
    codes[in_zeps & ~left & right] = REGION_CODE[RegionLabel.RIGHT_FOLD]
    codes[in_zeps & ~left & ~right] = REGION_CODE[RegionLabel.YOUNG_PART]
    return codes


def labels_from_codes(codes: np.ndarray) -> np.ndarray:
    # filled one element at a time: numpy would coerce str-enum members to plain strings
    table = np.empty(len(REGION_ORDER), dtype=object)
    for code, label in enumerate(REGION_ORDER):
        table[code] = label
    return table[np.asarray(codes, dtype=np.intp)]


def classify_grid(t, s, p: PhaseParams, eps: float) -> np.ndarray:
    """Region labels (RegionLabel members, dtype object) on broadcast arrays of t and s."""
    return labels_from_codes(region_codes(t, s, p, eps))


def classify_region(t: float, s: float, p: PhaseParams, eps: float) -> RegionLabel:
    """Region of (t, s) in the decomposition of [0,1] x I."""
    return REGION_ORDER[int(region_codes(np.array([t]), np.array([s]), p, eps)[0])]
