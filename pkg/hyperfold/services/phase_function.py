"""
The two-geodesic phase phi(t, s) = dist(gamma1(t), gamma2(s)) and its
derivatives.

Notation used throughout:
    c = a cos(beta)
    P = e^{s+t}, Q = d1^2 e^{s-t}, R = e^{t-s}, S = d2^2 e^{-s-t}
    cosh(phi) = (P + Q + R + S) / (4r)                 (e^{s+t} cosh phi = A / 4r)
    phi_st    = [(c - r)(P + S) + (c + r)(Q + R)] / (4 r^2 sinh^3 phi)

Dividing the textbook numerator and denominator by e^{3(s+t)} gives the
second line; sinh(phi) is taken from the Euclidean excess u = cosh(phi) - 1
so nothing cancels when the two points are close.
"""

import logging
import math

import numpy as np

from hyperfold.exceptions import DomainError
from hyperfold.models.geometry_models import PhaseParams

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps

# Fourth-order central first-derivative stencil (offsets -2..2, the 0 weight dropped)
_FD4_OFFSETS = (-2, -1, 1, 2)
_FD4_WEIGHTS = (1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0)


# --- building blocks ---

def exp_terms(t, s, p: PhaseParams):
    """(P, Q, R, S) on broadcast arrays of t and s."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    return (
        np.exp(s + t),
        p.d1_sq * np.exp(s - t),
        np.exp(t - s),
        p.d2_sq * np.exp(-s - t),
    )


def excess_u(t, s, p: PhaseParams) -> np.ndarray:
    """u = cosh(phi) - 1 from the Euclidean chord, free of cancellation."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    th = -np.tanh(s)
    x = p.a + th * p.r * p.cos_beta
    y = th * p.r * p.sin_beta
    z = p.r / np.cosh(s)
    zt = np.exp(t)
    return (x * x + y * y + (z - zt) ** 2) / (2.0 * z * zt)


def big_a(t, s, p: PhaseParams) -> np.ndarray:
    """A = e^{2s+2t} + e^{2t} + d1^2 e^{2s} + d2^2."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    e2t = np.exp(2.0 * t)
    e2s = np.exp(2.0 * s)
    return e2s * e2t + e2t + p.d1_sq * e2s + p.d2_sq


def bracket_numerator(t, s, p: PhaseParams) -> np.ndarray:
    """(a cos b - r)(e^{2s+2t} + d2^2) + (a cos b + r)(e^{2t} + d1^2 e^{2s}); same sign as phi_st."""
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    c = p.a * p.cos_beta
    e2t = np.exp(2.0 * t)
    e2s = np.exp(2.0 * s)
    return (c - p.r) * (e2s * e2t + p.d2_sq) + (c + p.r) * (e2t + p.d1_sq * e2s)


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


# --- phi ---

def phi_array(t, s, p: PhaseParams) -> np.ndarray:
    u = excess_u(t, s, p)
    return np.log1p(u + np.sqrt(u * (u + 2.0)))


def phi(t: float, s: float, p: PhaseParams) -> float:
    """Hyperbolic distance between gamma1(t) and gamma2(s)."""
    return _scalar(phi_array(t, s, p))


def cosh_identity_residual(t, s, p: PhaseParams):
    """Relative residual of e^{s+t} cosh(phi) = A / (4r)."""
    lhs = np.exp(np.asarray(t, float) + np.asarray(s, float)) * (1.0 + excess_u(t, s, p))
    rhs = big_a(t, s, p) / (4.0 * p.r)
    return _scalar(np.abs(lhs - rhs) / np.abs(rhs))


# --- first derivatives ---

def phi_t_array(t, s, p: PhaseParams) -> np.ndarray:
    pp, qq, rr, ss = exp_terms(t, s, p)
    u = excess_u(t, s, p)
    sinh_phi = np.sqrt(u * (u + 2.0))
    # d/dt cosh(phi) = (P - Q + R - S) / 4r
    return (pp - qq + rr - ss) / (4.0 * p.r * sinh_phi)


def phi_s_array(t, s, p: PhaseParams) -> np.ndarray:
    pp, qq, rr, ss = exp_terms(t, s, p)
    u = excess_u(t, s, p)
    sinh_phi = np.sqrt(u * (u + 2.0))
    return (pp + qq - rr - ss) / (4.0 * p.r * sinh_phi)


def phi_t(t: float, s: float, p: PhaseParams) -> float:
    return _scalar(phi_t_array(t, s, p))


def phi_s(t: float, s: float, p: PhaseParams) -> float:
    return _scalar(phi_s_array(t, s, p))


# --- mixed derivative ---

def phi_st_array(t, s, p: PhaseParams) -> np.ndarray:
    pp, qq, rr, ss = exp_terms(t, s, p)
    u = excess_u(t, s, p)
    sinh_phi = np.sqrt(u * (u + 2.0))
    if np.any(sinh_phi == 0.0):
        raise DomainError("phi_st is undefined at coincident points (A^2 = 16 r^2 e^{2s+2t})")
    c = p.a * p.cos_beta
    numerator = (c - p.r) * (pp + ss) + (c + p.r) * (qq + rr)
    return numerator / (4.0 * p.r * p.r * sinh_phi ** 3)


def phi_st(t: float, s: float, p: PhaseParams) -> float:
    """Closed-form mixed derivative of phi."""
    return _scalar(phi_st_array(t, s, p))


def phi_st_scale(t, s, p: PhaseParams):
    """
    Magnitude against which phi_st is judged near its zeros: the same
    expression with the numerator terms taken in absolute value.
    """
    pp, qq, rr, ss = exp_terms(t, s, p)
    u = excess_u(t, s, p)
    sinh_phi = np.sqrt(u * (u + 2.0))
    c = p.a * p.cos_beta
    scale = (abs(c - p.r) * (pp + ss) + (c + p.r) * (qq + rr)) / (4.0 * p.r * p.r * sinh_phi ** 3)
    return _scalar(scale)


def phi_st_lower_proxy(t, s, p: PhaseParams, T: float):
    """
    |bracket| / (cosh^2 T r A), a lower bound for |phi_st| wherever phi <= T.
    """
    return _scalar(np.abs(bracket_numerator(t, s, p)) / (math.cosh(T) ** 2 * p.r * big_a(t, s, p)))


def derivative_identity_residual(t, s, p: PhaseParams):
    """
    Residual of (phi_t + phi_s + phi_st) sinh phi + (1 + phi_t phi_s) cosh phi = e^{s+t} / r,
    the t-s derivative of the cosh identity, relative to its largest term.
    """
    u = excess_u(t, s, p)
    sinh_phi = np.sqrt(u * (u + 2.0))
    cosh_phi = 1.0 + u
    ft = phi_t_array(t, s, p)
    fs = phi_s_array(t, s, p)
    fst = phi_st_array(t, s, p)
    rhs = np.exp(np.asarray(t, float) + np.asarray(s, float)) / p.r
    lhs = (ft + fs + fst) * sinh_phi + (1.0 + ft * fs) * cosh_phi
    scale = (np.abs(ft) + np.abs(fs) + np.abs(fst)) * sinh_phi + (1.0 + np.abs(ft * fs)) * cosh_phi
    return _scalar(np.abs(lhs - rhs) / np.maximum(scale, np.abs(rhs)))


# --- finite-difference oracle ---

def phi_increment(t, s, p: PhaseParams, dt: float, ds: float) -> np.ndarray:
    """
    phi(t + dt, s + ds) - phi(t, s) without forming the two phis.

    The exponential terms move by expm1 factors, and the arcosh difference is
    rewritten as a log1p of increments, so stencils see no subtraction noise.
    """
    pp, qq, rr, ss = exp_terms(t, s, p)
    u = excess_u(t, s, p)
    cosh_phi = 1.0 + u
    sinh_phi = np.sqrt(u * (u + 2.0))
    d_cosh = (
        pp * math.expm1(dt + ds)
        + qq * math.expm1(ds - dt)
        + rr * math.expm1(dt - ds)
        + ss * math.expm1(-dt - ds)
    ) / (4.0 * p.r)
    new_cosh = cosh_phi + d_cosh
    new_sinh = np.sqrt((new_cosh - 1.0) * (new_cosh + 1.0))
    d_sinh = d_cosh * (2.0 * cosh_phi + d_cosh) / (new_sinh + sinh_phi)
    return np.log1p((d_cosh + d_sinh) / (cosh_phi + sinh_phi))


def default_fd_step(t, s) -> float:
    return 1e-3 * max(1.0, float(np.max(np.abs(t))), float(np.max(np.abs(s))))


def _mixed_fd4(t, s, p: PhaseParams, h: float) -> np.ndarray:
    total = 0.0
    for i, wi in zip(_FD4_OFFSETS, _FD4_WEIGHTS):
        for j, wj in zip(_FD4_OFFSETS, _FD4_WEIGHTS):
            total = total + wi * wj * phi_increment(t, s, p, i * h, j * h)
    return total / (h * h)


def phi_st_numeric_array(t, s, p: PhaseParams, h: float | None = None, richardson: bool = True) -> np.ndarray:
    if h is None:
        h = default_fd_step(t, s)
    if not h > 0.0:
        raise DomainError(f"finite-difference step must be positive, got h={h!r}")
    scale = max(1.0, float(np.max(np.abs(t))), float(np.max(np.abs(s))))
    if h < 1e3 * _EPS * scale:
        logger.warning("phi_st_numeric: step h=%.3e is below the roundoff floor %.3e", h, 1e3 * _EPS * scale)
    coarse = _mixed_fd4(t, s, p, h)
    if not richardson:
        return coarse
    fine = _mixed_fd4(t, s, p, 0.5 * h)
    return (16.0 * fine - coarse) / 15.0


def phi_st_numeric(t: float, s: float, p: PhaseParams, h: float | None = None, richardson: bool = True) -> float:
    """Fourth-order mixed central difference of phi with one Richardson level."""
    return _scalar(phi_st_numeric_array(t, s, p, h, richardson))


def mixed_derivative_fd(t, s, p: PhaseParams, order: tuple[int, int], h: float) -> np.ndarray:
    """
    D^(i,j) phi by nested second-order central differences with one
    Richardson level; i, j >= 1.
    """
    i, j = order

    def nested(step: float) -> np.ndarray:
        total = 0.0
        for m in range(i + 1):
            for n in range(j + 1):
                weight = (-1) ** (m + n) * math.comb(i, m) * math.comb(j, n)
                total = total + weight * phi_increment(t, s, p, (i - 2 * m) * step, (j - 2 * n) * step)
        return total / (2.0 * step) ** (i + j)

    return (4.0 * nested(0.5 * h) - nested(h)) / 3.0


def phi_stt_numeric(t: float, s: float, p: PhaseParams, h: float = 1e-3) -> float:
    """d/dt of the closed-form phi_st by a fourth-order central difference."""
    total = 0.0
    for i, w in zip(_FD4_OFFSETS, _FD4_WEIGHTS):
        total += w * phi_st(t + i * h, s, p)
    return total / h
