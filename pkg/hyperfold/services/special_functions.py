"""
Bessel J1 and the kernels G(v) = J1(v)/v and G'(v)/v of the explicit
wave kernel on H^3.

Two regimes:
- |v| <= 12: the power series, summed until the terms drop below 1e-16 of the sum.
- |v| > 12: the Hankel asymptotic expansion truncated at its minimal term.

G and G'/v are entire in w = v^2; near the origin they are summed as
w-series so the removable singularity costs nothing. Public scalar
functions wrap vectorised ``*_array`` kernels that the quadratures use.
"""

import logging
import math

import numpy as np

from hyperfold.models.result_models import BesselEval, BesselRegime

logger = logging.getLogger(__name__)

SERIES_LIMIT = 12.0
W_SERIES_LIMIT = 0.5

_EPS = np.finfo(float).eps
_MAX_SERIES_TERMS = 80
_MAX_ASYMPTOTIC_TERMS = 120
_MIN_ASYMPTOTIC_TERMS = 5
_W_SERIES_TERMS = 14


# --- general order helpers (orders 0, 1, 2 only) ---

def _series_jn(nu: int, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Power series of J_nu(v); returns (value, absolute error estimate)."""
    half = 0.5 * v
    quarter_sq = half * half
    term = half ** nu / math.factorial(nu)
    total = term.copy()
    biggest = np.abs(term)
    omitted = np.zeros_like(v)
    active = np.ones(v.shape, dtype=bool)
    for k in range(1, _MAX_SERIES_TERMS):
        term = -term * quarter_sq / (k * (k + nu))
        total = np.where(active, total + term, total)
        biggest = np.where(active, np.maximum(biggest, np.abs(term)), biggest)
        done = active & (np.abs(term) <= 1e-16 * np.abs(total))
        omitted = np.where(done, np.abs(term * quarter_sq / ((k + 1) * (k + 1 + nu))), omitted)
        active &= ~done
        if not active.any():
            break
    # Rounding in the alternating sum dominates the truncation error
    return total, _EPS * biggest + omitted


def _hankel_jn(nu: int, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Hankel expansion J_nu(v) ~ sqrt(2/(pi v)) (P cos chi - Q sin chi), v > 0,
    truncated before its smallest term. Returns (value, first omitted term).
    """
    mu = 4.0 * nu * nu
    chi = v - (0.5 * nu + 0.25) * math.pi
    cos_chi = np.cos(chi)
    sin_chi = np.sin(chi)

    # a_k(nu) / v^k with the alternating signs of P and Q folded in
    term = np.ones_like(v)
    p_sum = np.ones_like(v)
    q_sum = np.zeros_like(v)
    prev_size = np.full(v.shape, np.inf)
    omitted = np.zeros_like(v)
    active = np.ones(v.shape, dtype=bool)
    for k in range(1, _MAX_ASYMPTOTIC_TERMS):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * v)
        size = np.abs(term)
        if k >= _MIN_ASYMPTOTIC_TERMS:
            stop = active & (size >= prev_size)
            omitted = np.where(stop, size, omitted)
            active &= ~stop
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p_sum = np.where(active, p_sum + sign * term, p_sum)
        else:
            q_sum = np.where(active, q_sum + sign * term, q_sum)
        # An exact zero (finite expansion for half-integer orders) ends the series
        finished = active & (size == 0.0)
        active &= ~finished
        prev_size = np.where(active, size, prev_size)
        if not active.any():
            break
    omitted = np.where(active, np.abs(term), omitted)
    envelope = np.sqrt(2.0 / (math.pi * v))
    return envelope * (p_sum * cos_chi - q_sum * sin_chi), envelope * omitted


def _jn_array(nu: int, v) -> tuple[np.ndarray, np.ndarray]:
    """J_nu on an array with the regime switch at |v| = 12. Orders 0 and 2 are even, 1 is odd."""
    v = np.asarray(v, dtype=float)
    shape = v.shape
    v = v.ravel()
    av = np.abs(v)
    value = np.empty_like(av)
    err = np.empty_like(av)
    small = av <= SERIES_LIMIT
    if small.any():
        value[small], err[small] = _series_jn(nu, av[small])
    if (~small).any():
        value[~small], err[~small] = _hankel_jn(nu, av[~small])
    if nu % 2 == 1:
        value = np.where(v < 0.0, -value, value)
    return value.reshape(shape), err.reshape(shape)


# --- J1 ---

def j1_array(v) -> np.ndarray:
    return _jn_array(1, v)[0]


def j1(v: float) -> BesselEval:
    """Bessel J1 with regime and error estimate. Odd in v bit-for-bit."""
    value, err = _jn_array(1, v)
    regime = BesselRegime.SERIES if abs(v) <= SERIES_LIMIT else BesselRegime.ASYMPTOTIC
    return BesselEval(value=float(value), regime=regime, est_error=float(err))


def j1_series(v: float) -> BesselEval:
    """J1 forced through the power series, whatever |v| is."""
    av = np.array([abs(v)])
    value, err = _series_jn(1, av)
    sign = -1.0 if v < 0.0 else 1.0
    return BesselEval(value=sign * float(value[0]), regime=BesselRegime.SERIES, est_error=float(err[0]))


def j1_asymptotic(v: float) -> BesselEval:
    """J1 forced through the Hankel expansion; needs v != 0."""
    av = np.array([abs(v)])
    value, err = _hankel_jn(1, av)
    sign = -1.0 if v < 0.0 else 1.0
    return BesselEval(value=sign * float(value[0]), regime=BesselRegime.ASYMPTOTIC, est_error=float(err[0]))


def _j0_array(v) -> np.ndarray:
    return _jn_array(0, v)[0]


def _j2_array(v) -> np.ndarray:
    return _jn_array(2, v)[0]


# --- G(v) = J1(v)/v and G'(v)/v ---

# G~(w) = sum_k c_k w^k with c_k = (-1)^k / (2^{2k+1} k! (k+1)!)
_G_COEFFS = np.array(
    [(-1) ** k / (2.0 ** (2 * k + 1) * math.factorial(k) * math.factorial(k + 1)) for k in range(_W_SERIES_TERMS)]
)
# 2 d/dw G~(w) = sum_k 2 (k+1) c_{k+1} w^k
_GPRIME_COEFFS = np.array([2.0 * (k + 1) * _G_COEFFS[k + 1] for k in range(_W_SERIES_TERMS - 1)])


def _horner(coeffs: np.ndarray, w: np.ndarray) -> np.ndarray:
    out = np.zeros_like(w)
    for c in coeffs[::-1]:
        out = out * w + c
    return out


def G_array(v) -> np.ndarray:
    v = np.abs(np.asarray(v, dtype=float))
    shape = v.shape
    v = v.ravel()
    out = np.empty_like(v)
    near = v < W_SERIES_LIMIT
    if near.any():
        out[near] = _horner(_G_COEFFS, v[near] * v[near])
    if (~near).any():
        far = v[~near]
        out[~near] = j1_array(far) / far
    return out.reshape(shape)


def G(v: float) -> float:
    """J1(v)/v, an even entire function with G(0) = 1/2."""
    return float(G_array(v))


def gprime_over_v_array(v) -> np.ndarray:
    v = np.abs(np.asarray(v, dtype=float))
    shape = v.shape
    v = v.ravel()
    out = np.empty_like(v)
    near = v < W_SERIES_LIMIT
    if near.any():
        out[near] = _horner(_GPRIME_COEFFS, v[near] * v[near])
    if (~near).any():
        far = v[~near]
        # G'(v) = J1'(v)/v - J1(v)/v^2 and J1' = J0 - J1/v
        out[~near] = _j0_array(far) / (far * far) - 2.0 * j1_array(far) / (far * far * far)
    return out.reshape(shape)


def gprime_over_v(v: float) -> float:
    """G'(v)/v, uniformly bounded with value -1/8 at the origin."""
    return float(gprime_over_v_array(v))


def gprime_over_v_branches(v: float) -> tuple[float, float]:
    """Both evaluations of G'(v)/v (w-series, closed form) at the same v, for continuity checks."""
    av = np.array([abs(v)])
    series = float(_horner(_GPRIME_COEFFS, av * av)[0])
    closed = float(_j0_array(av)[0] / (av[0] ** 2) - 2.0 * j1_array(av)[0] / (av[0] ** 3))
    return series, closed


def g_envelope(v) -> np.ndarray:
    """
    Leading large-v behaviour of G: sqrt(2/pi) v^{-3/2} cos(v - 3pi/4).
    """
    v = np.asarray(v, dtype=float)
    return math.sqrt(2.0 / math.pi) * v ** -1.5 * np.cos(v - 0.75 * math.pi)


def gprime_decay_crossover(c_bound: float = 1.0, v_max: float = 1000.0, n: int = 20001) -> float:
    """
    Smallest sampled N such that |G'(v)/v| <= c_bound v^{-5/2} for all sampled v > N.
    Records the empirical onset of the large-v decay.
    """
    v = np.linspace(1e-3, v_max, n)
    ok = np.abs(gprime_over_v_array(v)) <= c_bound * v ** -2.5
    bad = np.nonzero(~ok)[0]
    crossover = 0.0 if bad.size == 0 else float(v[bad[-1]])
    logger.debug("G'(v)/v decay crossover for C=%g: N=%g", c_bound, crossover)
    return crossover


def regime_overlap_error(v_lo: float = 10.0, v_hi: float = 14.0, n: int = 401) -> float:
    """
    Max disagreement of the series and Hankel evaluations of J1 on [v_lo, v_hi],
    relative to max(|J1|, sqrt(2/(pi v))) so zeros of J1 do not dominate.
    """
    v = np.linspace(v_lo, v_hi, n)
    series, _ = _series_jn(1, v)
    asymptotic, _ = _hankel_jn(1, v)
    scale = np.maximum(np.abs(series), np.sqrt(2.0 / (math.pi * v)))
    worst = float(np.max(np.abs(series - asymptotic) / scale))
    logger.debug("J1 regime overlap on [%g, %g]: %.3e", v_lo, v_hi, worst)
    return worst
