"""
The explicit wave kernel on H^3 and the smoothed kernel K_alpha.

For the shifted Laplacian the half-wave kernel at geodesic distance r is
    W(t, r) = [delta'(|t| - r) - J1'(0) |t| delta(|t| - r)
               - r |t| G'(v)/v 1_{r <= |t|}] / (4 pi sinh r),   v = sqrt(t^2 - r^2),
and K_alpha = (1/(pi T)) int (1 - beta(tau)) chi_hat(tau/T) e^{i lam tau} W(tau, r) dtau.
The two distributional pieces are evaluated as boundary terms; only the
tail is integrated numerically.

Fourier convention: rho(x) = (1/2pi) int rho_hat(tau) e^{i x tau} dtau, so
rho(0) = (1/2pi) int rho_hat = 1 and chi_hat = (rho_hat * rho_hat) / 2pi
is the transform of chi = rho^2.
"""

import logging
import math
import statistics
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from hyperfold.exceptions import DomainError, PreconditionError, QuadratureError
from hyperfold.models.geometry_models import PhaseParams
from hyperfold.models.result_models import KernelEvaluation, KernelSweep, ShellMaximum, TubeSumAudit
from hyperfold.services import phase_function as pf
from hyperfold.services import special_functions as sf
from hyperfold.utils.helpers import deterministic_map
from hyperfold.utils.numerics import composite_gauss_legendre, fd4_derivative, panel_breaks, smooth_step, smooth_step_prime

logger = logging.getLogger(__name__)

CUTOFF_GRID = 4096
J1_PRIME_AT_ZERO = 0.5
TAIL_ORDER = 6
TAIL_RTOL = 1e-8
TAIL_L1_FLOOR = 1e-13
BETA_INNER = 1.5
BETA_OUTER = 2.0

_QUAD_OPTS = {"epsabs": 0.0, "epsrel": 1e-12, "limit": 400}


# --- cutoffs ---

def _standard_bump(tau: np.ndarray) -> np.ndarray:
    out = np.zeros_like(tau)
    inside = np.abs(tau) < 0.5
    x = 2.0 * tau[inside]
    out[inside] = np.exp(-1.0 / (1.0 - x * x))
    return out


BUMP_PROFILES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "standard-bump": _standard_bump,
}


@dataclass(frozen=True)
class FourierConvention:
    inverse_factor: float = 1.0 / (2.0 * math.pi)
    sign: int = 1
    description: str = "rho(x) = (1/2pi) int rho_hat(tau) e^{i x tau} dtau"


@dataclass(frozen=True)
class CutoffPair:
    """
    rho_hat supported in [-1/2, 1/2], its autocorrelation chi_hat supported in
    [-1, 1], and the bump beta (1 on |tau| <= 3/2, 0 on |tau| >= 2).
    """

    shape: str
    scale: float
    grid: np.ndarray
    rho_hat_grid: np.ndarray
    chi_grid: np.ndarray
    chi_hat_grid: np.ndarray
    spline: CubicSpline
    spline_prime: CubicSpline
    normalization: FourierConvention

    def rho_hat(self, tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        return self.scale * BUMP_PROFILES[self.shape](tau)

    def chi_hat(self, tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        inside = np.abs(tau) < 1.0
        out = np.zeros_like(tau)
        out[inside] = self.spline(tau[inside])
        return out

    def chi_hat_prime(self, tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        inside = np.abs(tau) < 1.0
        out = np.zeros_like(tau)
        out[inside] = self.spline_prime(tau[inside])
        return out

    def rho(self, x):
        """rho on the grid convention; real because rho_hat is even."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        h = self.grid[1] - self.grid[0]
        return (h / (2.0 * math.pi)) * np.cos(np.outer(x, self.grid)) @ self.rho_hat_grid

    def chi(self, x):
        return self.rho(x) ** 2

    @staticmethod
    def beta_bump(tau):
        tau = np.abs(np.atleast_1d(np.asarray(tau, dtype=float)))
        return smooth_step(2.0 * (BETA_OUTER - tau))

    @staticmethod
    def beta_bump_prime(tau):
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        return -2.0 * np.sign(tau) * smooth_step_prime(2.0 * (BETA_OUTER - np.abs(tau)))


def make_cutoffs(shape: str = "standard-bump") -> CutoffPair:
    """Build the cutoff pair for a named bump profile."""
    if shape not in BUMP_PROFILES:
        raise DomainError(f"unknown cutoff shape {shape!r}; known: {sorted(BUMP_PROFILES)}")
    grid = np.linspace(-0.5, 0.5, CUTOFF_GRID)
    h = grid[1] - grid[0]
    raw = BUMP_PROFILES[shape](grid)
    # endpoints vanish, so the trapezoid sum is h * sum
    scale = 2.0 * math.pi / (h * raw.sum())
    rho_hat_grid = scale * raw

    chi_grid = np.linspace(-1.0, 1.0, 2 * CUTOFF_GRID - 1)
    chi_hat_grid = np.convolve(rho_hat_grid, rho_hat_grid) * h / (2.0 * math.pi)
    spline = CubicSpline(chi_grid, chi_hat_grid)
    logger.debug("cutoffs %s: rho_hat scale %.6g, chi_hat(0) %.6g", shape, scale, chi_hat_grid[CUTOFF_GRID - 1])
    return CutoffPair(
        shape=shape,
        scale=scale,
        grid=grid,
        rho_hat_grid=rho_hat_grid,
        chi_grid=chi_grid,
        chi_hat_grid=chi_hat_grid,
        spline=spline,
        spline_prime=spline.derivative(),
        normalization=FourierConvention(),
    )


# --- the explicit kernel ---

def wave_tail_array(t, r: float) -> np.ndarray:
    t = np.abs(np.asarray(t, dtype=float))
    out = np.zeros_like(t)
    beyond = t >= r
    if beyond.any():
        v = np.sqrt((t[beyond] - r) * (t[beyond] + r))
        out[beyond] = r * t[beyond] * sf.gprime_over_v_array(v)
    return out


def wave_tail(t: float, r: float) -> float:
    """r |t| G'(v)/v for |t| >= r, 0 inside the light cone."""
    if not r > 0.0:
        raise DomainError(f"wave_tail needs r > 0, got {r!r}")
    return float(wave_tail_array(np.array([t]), r)[0])


def _window(tau, lam: float, T: float, cut: CutoffPair) -> np.ndarray:
    """(1 - beta(tau)) chi_hat(tau/T) e^{i lam tau}."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    return (1.0 - cut.beta_bump(tau)) * cut.chi_hat(tau / T) * np.exp(1j * lam * tau)


def _window_prime(tau, lam: float, T: float, cut: CutoffPair) -> np.ndarray:
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    one_minus_beta = 1.0 - cut.beta_bump(tau)
    chi = cut.chi_hat(tau / T)
    amplitude_prime = -cut.beta_bump_prime(tau) * chi + one_minus_beta * cut.chi_hat_prime(tau / T) / T
    return (amplitude_prime + 1j * lam * one_minus_beta * chi) * np.exp(1j * lam * tau)


def _tail_integral(r: float, lam: float, T: float, cut: CutoffPair, n_panels_scale: int) -> tuple[float, float, int]:
    """
    int_{r <= |tau| <= T} (1 - beta) chi_hat(tau/T) e^{i lam tau} wave_tail(tau, r) dtau.

    The window is even apart from the exponential, so both half-lines
    combine into 2 cos(lam tau). Returns (value, L1 size, node count).
    """
    lo = max(r, BETA_INNER)
    if lo >= T:
        return 0.0, 0.0, 0
    width = min(0.05, 0.5 * math.pi / lam) / n_panels_scale
    breaks = panel_breaks(lo, T, width, cuts=(BETA_OUTER,))
    nodes, weights = composite_gauss_legendre(breaks, TAIL_ORDER)
    amplitude = (1.0 - cut.beta_bump(nodes)) * cut.chi_hat(nodes / T) * wave_tail_array(nodes, r)
    integrand = 2.0 * amplitude * np.cos(lam * nodes)
    return float(weights @ integrand), float(weights @ np.abs(integrand)), nodes.size


def k_alpha_radial(r: float, lam: float, T: float, cut: CutoffPair) -> KernelEvaluation:
    """K_alpha at geodesic distance r, as its three contributions."""
    violations = []
    if r < 1.0:
        violations.append(f"r={r:.6g} < 1")
    if not lam > 0.0:
        violations.append(f"lambda={lam!r} must be positive")
    if T < 2.0:
        violations.append(f"T={T!r} < 2")
    if violations:
        raise PreconditionError(violations)

    if r >= T:
        return KernelEvaluation(0j, 0j, 0j, r=r, lam=lam, T=T)

    kappa = 1.0 / (math.pi * T * 4.0 * math.pi * math.sinh(r))
    ends = np.array([r, -r])
    g = _window(ends, lam, T, cut)
    gp = _window_prime(ends, lam, T, cut)
    delta_prime_term = kappa * complex(-gp[0] + gp[1])
    delta_term = -kappa * J1_PRIME_AT_ZERO * r * complex(g[0] + g[1])

    coarse, _, _ = _tail_integral(r, lam, T, cut, 1)
    fine, l1, nodes = _tail_integral(r, lam, T, cut, 2)
    change = abs(fine - coarse)
    if change > max(TAIL_RTOL * abs(fine), TAIL_L1_FLOOR * l1):
        achieved = change / abs(fine) if fine else math.inf
        raise QuadratureError(f"tail quadrature at r={r:g}, lambda={lam:g}, T={T:g} did not settle", achieved, TAIL_RTOL)
    tail_term = complex(-kappa * fine)

    logger.debug("k_alpha r=%g lambda=%g T=%g: tail nodes %d, change %.3e", r, lam, T, nodes, change)
    return KernelEvaluation(
        delta_prime_term=delta_prime_term,
        delta_term=delta_term,
        tail_term=tail_term,
        r=r,
        lam=lam,
        T=T,
        tail_nodes=nodes,
    )


def k_alpha(t_param: float, s_param: float, p: PhaseParams, lam: float, T: float, cut: CutoffPair) -> KernelEvaluation:
    """K_alpha at r = phi(t_param, s_param)."""
    return k_alpha_radial(pf.phi(t_param, s_param, p), lam, T, cut)


def term_ratios(ev: KernelEvaluation) -> dict[str, float]:
    """
    Each term scaled by its expected size: lam/(T sinh r), r/(T sinh r)
    and (r + r^2)/(T sinh r).
    """
    base = ev.T * math.sinh(ev.r)
    return {
        "delta_prime": abs(ev.delta_prime_term) * base / ev.lam,
        "delta": abs(ev.delta_term) * base / ev.r,
        "tail": abs(ev.tail_term) * base / (ev.r + ev.r * ev.r),
    }


# --- pairings with test functions ---

def _derivative_at(test_fn, derivative, x: float) -> float:
    if derivative is not None:
        return float(derivative(x))
    return float(fd4_derivative(test_fn, x, 1e-4 * max(1.0, abs(x))))


def _half_line_pairing(test_fn, derivative, r: float, lo: float, hi: float) -> float:
    """Pairing of W(., r) restricted to t > 0 with a test function supported in [lo, hi]."""
    lo = max(lo, 0.0)
    if hi <= lo:
        return 0.0
    kappa = 1.0 / (4.0 * math.pi * math.sinh(r))
    boundary = 0.0
    if lo <= r <= hi:
        boundary = -_derivative_at(test_fn, derivative, r) - J1_PRIME_AT_ZERO * r * float(test_fn(r))
    tail = 0.0
    start = max(r, lo)
    if start < hi:
        tail, _ = quad(lambda t: float(test_fn(t)) * wave_tail(t, r), start, hi, **_QUAD_OPTS)
    return kappa * (boundary - tail)


def wave_pairing(test_fn, r: float, support: tuple[float, float], derivative=None) -> float:
    """
    <W(., r), test_fn> over the whole line; the t < 0 half is the t > 0
    pairing of the reflected test function.
    """
    lo, hi = support
    positive = _half_line_pairing(test_fn, derivative, r, lo, hi)

    def reflected(t):
        return test_fn(-t)

    reflected_derivative = None if derivative is None else (lambda t: -derivative(-t))
    negative = _half_line_pairing(reflected, reflected_derivative, r, -hi, -lo)
    return positive + negative


def relation_oracle(test_fn, r: float, support: tuple[float, float], derivative=None) -> float:
    """
    Pairing of cos t sqrt(-Delta) delta_y with a test function through the
    transmutation from the shifted Laplacian:
        cos t sqrt(-Delta) = cos t sqrt(-L) - t int_0^t G(sqrt(t^2 - s^2)) cos s sqrt(-L) ds.
    With H(s) = int_0^inf test_fn(sqrt(s^2 + u^2)) G(u) u du the pairing is
        (-test_fn'(r) + H'(r)) / (4 pi sinh r).
    """
    lo, hi = support
    if lo <= 0.0:
        raise DomainError(f"relation oracle needs support in t > 0, got [{lo}, {hi}]")
    kappa = 1.0 / (4.0 * math.pi * math.sinh(r))

    direct = 0.0
    if lo <= r <= hi:
        direct = -_derivative_at(test_fn, derivative, r)

    h_prime = 0.0
    if hi > r:
        u_lo = math.sqrt(max(lo * lo - r * r, 0.0))
        u_hi = math.sqrt(hi * hi - r * r)

        def integrand(u: float) -> float:
            t = math.hypot(r, u)
            return _derivative_at(test_fn, derivative, t) * (r / t) * u * sf.G(u)

        h_prime, _ = quad(integrand, u_lo, u_hi, **_QUAD_OPTS)
    return kappa * (direct + h_prime)


# --- sweeps ---

def tube_sum_audit(lam: float, T: float, cut: CutoffPair, samples: int = 9) -> TubeSumAudit:
    """
    Dyadic shell sum sum_k 2^k max_{shell k} |K_alpha| against
    lam T^{-1} sum_k 2^k e^{-2^k / 2}; reports the implied constant.
    """
    shells = []
    reference = 0.0
    k = 0
    while 2.0 ** k < T:
        r_lo = 2.0 ** k
        r_hi = min(2.0 ** (k + 1), T)
        radii = np.linspace(r_lo, r_hi, samples)
        max_abs = max(abs(k_alpha_radial(float(r), lam, T, cut).total) for r in radii)
        shells.append(ShellMaximum(k=k, r_lo=r_lo, r_hi=r_hi, max_abs=max_abs))
        reference += r_lo * math.exp(-0.5 * r_lo)
        k += 1
    reference *= lam / T
    total = sum(2.0 ** s.k * s.max_abs for s in shells)
    implied = total / reference if reference > 0.0 else math.inf
    logger.info("tube sum lambda=%g T=%g: total %.6g, implied C %.6g", lam, T, total, implied)
    return TubeSumAudit(lam=lam, T=T, shells=shells, total=total, reference=reference, implied_C=implied)


def _sweep_key(lam: float, T: float) -> str:
    return f"lambda={lam:g},T={T:g}"


def kernel_ratio_sweep(
    r_values,
    lam_grid,
    T_grid,
    cut: CutoffPair,
    threads: int = 1,
    max_spread: float = 8.0,
    max_median_excess: float = 10.0,
) -> KernelSweep:
    """
    bound_ratio = |K| T e^{r/2} / lam over every (r, lambda, T) with 1 <= r <= T.

    The bound |K| <= C lam T^{-1} e^{-r/2} is one-sided and the cutoff window
    zeroes K at r = T and wherever 1 - beta vanishes, so pointwise ratios are
    not compared. Instead the sup of the ratio over r in [1, T - 1] and all
    lambda is taken per T; those per-T sups must agree within max_spread, and
    no per-(lambda, T) sup may exceed max_median_excess times their median.
    The overall sup is reported as the implied C.
    """
    points = [(float(r), float(lam), float(T)) for T in T_grid for lam in lam_grid for r in r_values if 1.0 <= r <= T]

    def evaluate(point):
        r, lam, T = point
        return k_alpha_radial(r, lam, T, cut)

    evaluations = deterministic_map(evaluate, points, threads)

    rows = []
    sups: dict[str, float] = {}
    T_sups: dict[str, float] = {}
    for ev in evaluations:
        total = ev.total
        ratio = ev.bound_ratio
        rows.append({"r": ev.r, "lambda": ev.lam, "T": ev.T, "re": total.real, "im": total.imag, "bound_ratio": ratio})
        if ev.r > ev.T - 1.0:
            continue
        key = _sweep_key(ev.lam, ev.T)
        sups[key] = max(sups.get(key, 0.0), ratio)
        T_key = f"T={ev.T:g}"
        T_sups[T_key] = max(T_sups.get(T_key, 0.0), ratio)

    per_T = list(T_sups.values())
    stability = max(per_T) / min(per_T) if per_T and min(per_T) > 0.0 else math.inf
    values = list(sups.values())
    median = statistics.median(values) if values else 0.0
    median_excess = max(values) / median if median > 0.0 else math.inf
    implied_C = max(per_T) if per_T else math.inf
    stable = stability <= max_spread and median_excess <= max_median_excess
    logger.info(
        "kernel ratio sweep: %d points, implied C %.4g, per-T spread %.4g, max/median %.4g",
        len(rows), implied_C, stability, median_excess,
    )
    return KernelSweep(
        rows=rows, sups=sups, T_sups=T_sups, implied_C=implied_C,
        stability=stability, median_excess=median_excess, stable=stable,
    )
