"""
The oscillatory operator

    T_lam f(t) = int e^{i lam phi(t, s)} a(t, s) f(s) ds

discretised by Gauss-Legendre quadrature on the support rectangle of a,
its adjoint, the kernel of T*T, operator-norm estimation, decay-exponent
fits and the explicit constants of the non-degenerate and fold bounds.

The discrete operator is W_t^{1/2} E W_s^{1/2} with E_ij = a(t_i, s_j) e^{i lam phi(t_i, s_j)},
so its largest singular value approximates ||T_lam||_{L^2 -> L^2}.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, LinearOperator, eigsh, svds
from scipy.stats import linregress

from hyperfold.exceptions import ConvergenceError, DomainError, UnderResolvedError
from hyperfold.models.geometry_models import PhaseParams, ZeroSetGeometry
from hyperfold.models.result_models import DecayFitResult, BoundConstants
from hyperfold.services import phase_function as pf
from hyperfold.services import zero_set as zs
from hyperfold.utils.helpers import deterministic_map
from hyperfold.utils.numerics import gauss_legendre_interval, smooth_step

logger = logging.getLogger(__name__)

MIN_NODES = 256
NODES_PER_OSCILLATION = 8
DENSE_LIMIT = 8_000_000
BLOCK_ENTRIES = 2_000_000
POWER_TOL = 1e-6
POWER_MAX_ITER = 500
LANCZOS_TOL = 1e-10
OPERATOR_NORM_METHODS = ("auto", "dense", "toeplitz")
SUP_GRID = 257

Rectangle = tuple[float, float, float, float]


# --- phases ---

@dataclass(frozen=True)
class Phase:
    """
    A real phase phi(t, s) with its gradient and mixed derivative, and the
    critical curves of phi_st when they are known in closed form.
    factors = (u, p, q) declares the form phi = u(t) s + p(t) + q(s).
    """

    name: str
    fn: Callable
    gradient: Callable
    mixed: Callable
    critical_t: Callable | None = None
    critical_s: Callable | None = None
    factors: tuple[Callable, Callable, Callable] | None = None

    def __call__(self, t, s):
        return self.fn(t, s)

    def gradient_sup(self, support: Rectangle, n: int = 65) -> float:
        t0, t1, s0, s1 = support
        tt, ss = np.meshgrid(np.linspace(t0, t1, n), np.linspace(s0, s1, n), indexing="ij")
        gt, gs = self.gradient(tt, ss)
        return float(np.max(np.hypot(gt, gs)))


def _broadcast(value, t, s):
    t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
    return np.full(t.shape, value, dtype=float)


def _zeros(x):
    return np.zeros_like(np.asarray(x, float))


def bilinear_phase() -> Phase:
    """phi = ts, phi_st = 1."""

    def gradient(t, s):
        t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
        return s, t

    return Phase(
        name="bilinear",
        fn=lambda t, s: np.asarray(t, float) * np.asarray(s, float),
        gradient=gradient,
        mixed=lambda t, s: _broadcast(1.0, t, s),
        factors=(lambda t: np.asarray(t, float), _zeros, _zeros),
    )


def fold_phase() -> Phase:
    """phi = (t - 1/2)^2 s: phi_st = 2(t - 1/2) vanishes on t = 1/2 with phi_stt = 2."""

    def gradient(t, s):
        t = np.asarray(t, float)
        s = np.asarray(s, float)
        return 2.0 * (t - 0.5) * s, (t - 0.5) ** 2 + 0.0 * s

    return Phase(
        name="fold",
        fn=lambda t, s: (np.asarray(t, float) - 0.5) ** 2 * np.asarray(s, float),
        gradient=gradient,
        mixed=lambda t, s: 2.0 * (np.asarray(t, float) - 0.5) + 0.0 * np.asarray(s, float),
        critical_t=lambda s: _broadcast(0.5, s, s),
        factors=(lambda t: (np.asarray(t, float) - 0.5) ** 2, _zeros, _zeros),
    )


def separable_phase() -> Phase:
    """phi = t + s: the kernel factorises and T_lam has rank one."""
    return Phase(
        name="separable",
        fn=lambda t, s: np.asarray(t, float) + np.asarray(s, float),
        gradient=lambda t, s: (_broadcast(1.0, t, s), _broadcast(1.0, t, s)),
        mixed=lambda t, s: _broadcast(0.0, t, s),
        factors=(_zeros, lambda t: np.asarray(t, float), lambda s: np.asarray(s, float)),
    )


def geodesic_phase(p: PhaseParams) -> Phase:
    """The two-geodesic distance phase, with critical curves from the zero set when it exists."""
    z = zs.zero_geometry(p)
    critical_t = None
    critical_s = None
    if not z.empty:
        critical_t = lambda s: zs.critical_t_array(s, z)  # noqa: E731
        critical_s = lambda t: zs.critical_s_array(t, z)  # noqa: E731
    return Phase(
        name="geodesic",
        fn=lambda t, s: pf.phi_array(t, s, p),
        gradient=lambda t, s: (pf.phi_t_array(t, s, p), pf.phi_s_array(t, s, p)),
        mixed=lambda t, s: pf.phi_st_array(t, s, p),
        critical_t=critical_t,
        critical_s=critical_s,
    )


MODEL_PHASES: dict[str, Callable[[], Phase]] = {
    "bilinear": bilinear_phase,
    "fold": fold_phase,
    "separable": separable_phase,
}


# --- amplitudes ---

@dataclass(frozen=True)
class Amplitude:
    """
    A real amplitude a(t, s) supported in a rectangle (t0, t1, s0, s1).
    sup_norms maps ("t", i) and ("s", i), i <= 2, to sup |d^i a|; estimated
    on a grid when not supplied.
    factors = (a1, a2) declares the product form a = a1(t) a2(s).
    """

    fn: Callable
    support: Rectangle
    sup_norms: dict = field(default_factory=dict)
    factors: tuple[Callable, Callable] | None = None

    def __post_init__(self):
        t0, t1, s0, s1 = self.support
        if not (t1 > t0 and s1 > s0):
            raise DomainError(f"empty support rectangle {self.support}")
        if not self.sup_norms:
            object.__setattr__(self, "sup_norms", estimate_sup_norms(self.fn, self.support))

    def __call__(self, t, s):
        return self.fn(t, s)

    @property
    def diam(self) -> float:
        t0, t1, s0, s1 = self.support
        return math.hypot(t1 - t0, s1 - s0)

    def scaled(self, c: float) -> "Amplitude":
        norms = {key: abs(c) * value for key, value in self.sup_norms.items()}
        factors = None
        if self.factors is not None:
            a1, a2 = self.factors
            factors = (lambda t: c * np.asarray(a1(t), float), a2)
        return Amplitude(fn=lambda t, s: c * self.fn(t, s), support=self.support, sup_norms=norms, factors=factors)


def estimate_sup_norms(fn: Callable, support: Rectangle, n: int = SUP_GRID) -> dict:
    """Sampled sup norms of d_t^i a and d_s^i a, i = 0, 1, 2."""
    t0, t1, s0, s1 = support
    t = np.linspace(t0, t1, n)
    s = np.linspace(s0, s1, n)
    tt, ss = np.meshgrid(t, s, indexing="ij")
    values = np.asarray(fn(tt, ss), dtype=float)
    norms = {("t", 0): float(np.max(np.abs(values))), ("s", 0): float(np.max(np.abs(values)))}
    dt = values
    ds = values
    for i in (1, 2):
        dt = np.gradient(dt, t, axis=0)
        ds = np.gradient(ds, s, axis=1)
        norms[("t", i)] = float(np.max(np.abs(dt)))
        norms[("s", i)] = float(np.max(np.abs(ds)))
    return norms


def _window(x, lo: float, hi: float, margin: float):
    x = np.asarray(x, dtype=float)
    shape = x.shape
    flat = x.ravel()
    out = smooth_step((flat - lo) / margin) * smooth_step((hi - flat) / margin)
    return out.reshape(shape)


def plateau_amplitude(support: Rectangle = (0.0, 1.0, 0.0, 1.0), margin: float = 0.25, height: float = 1.0) -> Amplitude:
    """Flat-top product bump: equal to height away from a margin-wide band at the edges."""
    t0, t1, s0, s1 = support
    mt = margin * (t1 - t0)
    ms = margin * (s1 - s0)
    return Amplitude(
        fn=lambda t, s: height * _window(t, t0, t1, mt) * _window(s, s0, s1, ms),
        support=support,
        factors=(lambda t: height * _window(t, t0, t1, mt), lambda s: _window(s, s0, s1, ms)),
    )


def product_amplitude(a1: Callable, a2: Callable, support: Rectangle) -> Amplitude:
    """a(t, s) = a1(t) a2(s)."""
    return Amplitude(
        fn=lambda t, s: np.asarray(a1(t), float) * np.asarray(a2(s), float),
        support=support,
        factors=(lambda t: np.asarray(a1(t), float), lambda s: np.asarray(a2(s), float)),
    )


def zero_amplitude(support: Rectangle = (0.0, 1.0, 0.0, 1.0)) -> Amplitude:
    norms = {(axis, i): 0.0 for axis in ("t", "s") for i in range(3)}
    return Amplitude(fn=lambda t, s: 0.0 * np.asarray(t, float) * np.asarray(s, float), support=support, sup_norms=norms)


# --- discretisation ---

def required_nodes(phase: Phase, amp: Amplitude, lam: float) -> int:
    """max(256, ceil(8 lam sup|grad phi| L / 2pi)) with L the longer side of the support."""
    t0, t1, s0, s1 = amp.support
    length = max(t1 - t0, s1 - s0)
    oscillations = lam * phase.gradient_sup(amp.support) * length / (2.0 * math.pi)
    return max(MIN_NODES, math.ceil(NODES_PER_OSCILLATION * oscillations))


@dataclass(frozen=True)
class SampledFunction:
    """Values at quadrature nodes, with the weights that define its L^2 norm."""

    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(self.weights @ np.abs(self.values) ** 2))

    def inner(self, other: "SampledFunction") -> complex:
        return complex(self.weights @ (self.values * np.conj(other.values)))


class DiscreteOperator:
    """
    T_lam on Gauss-Legendre nodes. The kernel matrix is kept when it has at
    most DENSE_LIMIT entries; larger operators are applied in row blocks.
    """

    def __init__(self, phase: Phase, amp: Amplitude, lam: float, n_nodes: int | None = None):
        if not lam > 0.0:
            raise DomainError(f"lambda must be positive, got {lam!r}")
        required = required_nodes(phase, amp, lam)
        if n_nodes is None:
            n_nodes = required
        elif n_nodes < required:
            raise UnderResolvedError(required, n_nodes)
        self.phase = phase
        self.amp = amp
        self.lam = lam
        self.n_nodes = n_nodes
        t0, t1, s0, s1 = amp.support
        self.t, self.wt = gauss_legendre_interval(t0, t1, n_nodes)
        self.s, self.ws = gauss_legendre_interval(s0, s1, n_nodes)
        self.sqrt_wt = np.sqrt(self.wt)
        self.sqrt_ws = np.sqrt(self.ws)
        self._dense = self._rows(0, n_nodes) if n_nodes * n_nodes <= DENSE_LIMIT else None
        self._block = max(1, BLOCK_ENTRIES // n_nodes)

    def _rows(self, start: int, stop: int) -> np.ndarray:
        tt, ss = np.meshgrid(self.t[start:stop], self.s, indexing="ij")
        return np.asarray(self.amp(tt, ss), float) * np.exp(1j * self.lam * self.phase(tt, ss))

    def kernel_times(self, x: np.ndarray) -> np.ndarray:
        """E x."""
        if self._dense is not None:
            return self._dense @ x
        out = np.empty(self.n_nodes, dtype=complex)
        for start in range(0, self.n_nodes, self._block):
            stop = min(start + self._block, self.n_nodes)
            out[start:stop] = self._rows(start, stop) @ x
        return out

    def kernel_h_times(self, y: np.ndarray) -> np.ndarray:
        """E^H y."""
        if self._dense is not None:
            return self._dense.conj().T @ y
        out = np.zeros(self.n_nodes, dtype=complex)
        for start in range(0, self.n_nodes, self._block):
            stop = min(start + self._block, self.n_nodes)
            out += self._rows(start, stop).conj().T @ y[start:stop]
        return out

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.sqrt_wt * self.kernel_times(self.sqrt_ws * x)

    def rmatvec(self, y: np.ndarray) -> np.ndarray:
        return self.sqrt_ws * self.kernel_h_times(self.sqrt_wt * y)

    def as_linear_operator(self) -> LinearOperator:
        n = self.n_nodes
        return LinearOperator(
            (n, n), matvec=lambda v: self.matvec(np.ravel(v)), rmatvec=lambda v: self.rmatvec(np.ravel(v)), dtype=complex
        )


class ToeplitzGram:
    """
    The Gram matrix M^H M of T_lam for phases u(t) s + p(t) + q(s) and
    product amplitudes a1(t) a2(s), on Gauss-Legendre nodes in t and a
    uniform trapezoid grid in s. Entry (j, k) is conj(d_j) d_k kappa((k - j) h)
    with d = sqrt(w_s) a2 e^{i lam q} and kappa(D) = sum_i w_i a1_i^2 e^{i lam u_i D},
    so the middle factor is Toeplitz and is applied by FFT on a circulant of size 2n.
    p(t) cancels.
    """

    def __init__(self, phase: Phase, amp: Amplitude, lam: float, n_nodes: int | None = None):
        if not lam > 0.0:
            raise DomainError(f"lambda must be positive, got {lam!r}")
        if phase.factors is None or amp.factors is None:
            raise DomainError(f"phase {phase.name!r} or its amplitude has no product form")
        required = required_nodes(phase, amp, lam)
        if n_nodes is None:
            n_nodes = required
        elif n_nodes < required:
            raise UnderResolvedError(required, n_nodes)
        self.lam = lam
        self.n_nodes = n_nodes
        u, _, q = phase.factors
        a1, a2 = amp.factors
        t0, t1, s0, s1 = amp.support

        t, wt = gauss_legendre_interval(t0, t1, n_nodes)
        weight = wt * np.asarray(a1(t), float) ** 2
        ut = np.asarray(u(t), float)
        self.s = np.linspace(s0, s1, n_nodes)
        h = (s1 - s0) / (n_nodes - 1)
        ws = np.full(n_nodes, h)
        ws[0] = ws[-1] = 0.5 * h
        self.d = np.sqrt(ws) * np.asarray(a2(self.s), float) * np.exp(1j * lam * np.asarray(q(self.s), float))

        lags = h * np.arange(n_nodes)
        kappa = np.empty(n_nodes, dtype=complex)
        block = max(1, BLOCK_ENTRIES // n_nodes)
        for start in range(0, n_nodes, block):
            stop = min(start + block, n_nodes)
            kappa[start:stop] = np.exp(1j * lam * np.outer(lags[start:stop], ut)) @ weight

        # first column conj(kappa_j), first row kappa_k
        column = np.concatenate([np.conj(kappa), [0.0], kappa[:0:-1]])
        self._symbol = np.fft.fft(column)
        logger.debug("toeplitz gram lambda=%g n=%d", lam, n_nodes)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        n = self.n_nodes
        padded = np.zeros(2 * n, dtype=complex)
        padded[:n] = self.d * x
        middle = np.fft.ifft(self._symbol * np.fft.fft(padded))[:n]
        return np.conj(self.d) * middle

    def as_linear_operator(self) -> LinearOperator:
        n = self.n_nodes
        return LinearOperator(
            (n, n), matvec=lambda v: self.matvec(np.ravel(v)), rmatvec=lambda v: self.matvec(np.ravel(v)), dtype=complex
        )


def _sample(f, nodes: np.ndarray) -> np.ndarray:
    if callable(f):
        return np.asarray(f(nodes), dtype=complex)
    values = np.asarray(f, dtype=complex)
    if values.shape != nodes.shape:
        raise DomainError(f"sampled function has {values.shape} values, expected {nodes.shape}")
    return values


def apply_T_lambda(f, phase: Phase, amp: Amplitude, lam: float, n_nodes: int | None = None) -> SampledFunction:
    """
    T_lam f at the output nodes. f is a callable of s or its values at the
    s-nodes of the discretisation.
    """
    op = DiscreteOperator(phase, amp, lam, n_nodes)
    values = op.kernel_times(op.ws * _sample(f, op.s))
    return SampledFunction(nodes=op.t, weights=op.wt, values=values)


def adjoint_T_lambda(h, phase: Phase, amp: Amplitude, lam: float, n_nodes: int | None = None) -> SampledFunction:
    """T_lam^* h(s) = int e^{-i lam phi(t, s)} a(t, s) h(t) dt."""
    op = DiscreteOperator(phase, amp, lam, n_nodes)
    values = op.kernel_h_times(op.wt * _sample(h, op.t))
    return SampledFunction(nodes=op.s, weights=op.ws, values=values)


def difference_quotient(t, s: float, s_prime: float, phase: Phase):
    """(phi(t, s) - phi(t, s')) / (s - s'); phi_s(t, s) on the diagonal."""
    if s == s_prime:
        return phase.gradient(t, np.full_like(np.asarray(t, float), s))[1]
    return (phase(t, s) - phase(t, s_prime)) / (s - s_prime)


def ttstar_kernel(s: float, s_prime: float, phase: Phase, amp: Amplitude, lam: float, n_nodes: int | None = None) -> complex:
    """
    K(s, s') = int e^{i lam (phi(t, s) - phi(t, s'))} a(t, s) a(t, s') dt,
    the phase being (s - s') times the difference quotient. T*T has kernel
    K(s', s) = conj K(s, s').
    """
    if n_nodes is None:
        n_nodes = required_nodes(phase, amp, lam)
    t0, t1, _, _ = amp.support
    t, w = gauss_legendre_interval(t0, t1, n_nodes)
    s_arr = np.full_like(t, s)
    sp_arr = np.full_like(t, s_prime)
    weight = np.asarray(amp(t, s_arr), float) * np.asarray(amp(t, sp_arr), float)
    if s == s_prime:
        return complex(w @ weight)
    shift = phase(t, s_arr) - phase(t, sp_arr)
    return complex(w @ (weight * np.exp(1j * lam * shift)))


# --- operator norm ---

def _uses_gram(phase: Phase, amp: Amplitude, lam: float, n_nodes: int | None, method: str) -> bool:
    if method not in OPERATOR_NORM_METHODS:
        raise DomainError(f"unknown operator norm method {method!r}; known: {', '.join(OPERATOR_NORM_METHODS)}")
    if method != "auto":
        return method == "toeplitz"
    if phase.factors is None or amp.factors is None:
        return False
    n = n_nodes if n_nodes is not None else required_nodes(phase, amp, lam)
    return n * n > DENSE_LIMIT


def _gram_norm(gram: ToeplitzGram, x: np.ndarray, tol: float, max_iter: int) -> float:
    """sqrt of the top eigenvalue of the Gram matrix, by power iteration then Lanczos."""
    previous = 0.0
    sigma = 0.0
    for iteration in range(1, max_iter + 1):
        y = gram.matvec(x)
        mu = float(np.linalg.norm(y))
        if mu == 0.0:
            return 0.0
        sigma = math.sqrt(mu)
        if abs(sigma - previous) <= tol * sigma:
            logger.debug("gram power iteration lambda=%g n=%d converged at %d: %.10g", gram.lam, gram.n_nodes, iteration, sigma)
            return sigma
        previous = sigma
        x = y / mu

    logger.warning("gram power iteration lambda=%g stalled after %d steps; Lanczos polish", gram.lam, max_iter)
    try:
        top = eigsh(gram.as_linear_operator(), k=1, which="LA", v0=x, tol=LANCZOS_TOL, return_eigenvectors=False)
    except (ArpackNoConvergence, ArpackError) as exc:
        raise ConvergenceError(f"operator norm at lambda={gram.lam:g} did not converge", previous, sigma) from exc
    return max(sigma, math.sqrt(max(float(top[0]), 0.0)))


def operator_norm(
    phase: Phase,
    amp: Amplitude,
    lam: float,
    n_nodes: int | None = None,
    seed: int = 0,
    tol: float = POWER_TOL,
    max_iter: int = POWER_MAX_ITER,
    method: str = "auto",
) -> float:
    """
    Largest singular value of the discretised T_lam by power iteration on
    T*T from a seeded start vector. When the iteration stalls (clustered
    top of the spectrum) a Lanczos solve started from the last iterate
    finishes the job; both estimates are lower bounds and the larger is returned.

    method "dense" works on the kernel matrix (kept or applied in row blocks),
    "toeplitz" on the FFT-applied Gram matrix of a product-form phase and
    amplitude; "auto" takes the Toeplitz route once the kernel matrix would
    exceed DENSE_LIMIT entries.
    """
    if all(value == 0.0 for value in amp.sup_norms.values()):
        DiscreteOperator(phase, amp, lam, n_nodes)
        return 0.0

    if _uses_gram(phase, amp, lam, n_nodes, method):
        gram = ToeplitzGram(phase, amp, lam, n_nodes)
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(gram.n_nodes) + 1j * rng.standard_normal(gram.n_nodes)
        return _gram_norm(gram, x / np.linalg.norm(x), tol, max_iter)

    op = DiscreteOperator(phase, amp, lam, n_nodes)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(op.n_nodes) + 1j * rng.standard_normal(op.n_nodes)
    x /= np.linalg.norm(x)
    previous = 0.0
    sigma = 0.0
    for iteration in range(1, max_iter + 1):
        y = op.matvec(x)
        sigma = float(np.linalg.norm(y))
        if sigma == 0.0:
            return 0.0
        if abs(sigma - previous) <= tol * sigma:
            logger.debug("power iteration lambda=%g n=%d converged at %d: %.10g", lam, op.n_nodes, iteration, sigma)
            return sigma
        previous = sigma
        x = op.rmatvec(y)
        x /= np.linalg.norm(x)

    logger.warning("power iteration lambda=%g stalled after %d steps; Lanczos polish", lam, max_iter)
    try:
        singular = svds(op.as_linear_operator(), k=1, v0=x, tol=LANCZOS_TOL, return_singular_vectors=False)
    except (ArpackNoConvergence, ArpackError) as exc:
        raise ConvergenceError(f"operator norm at lambda={lam:g} did not converge", previous, sigma) from exc
    return max(sigma, float(singular[0]))


# --- decay fits ---

def _check_dyadic(lambda_grid) -> list[float]:
    grid = [float(v) for v in lambda_grid]
    if len(grid) < 5:
        raise DomainError(f"decay fit needs at least 5 lambdas, got {len(grid)}")
    for lo, hi in zip(grid[:-1], grid[1:]):
        if not math.isclose(hi / lo, 2.0, rel_tol=1e-9):
            raise DomainError(f"lambda grid must be dyadic; {lo:g} -> {hi:g}")
    return grid


def decay_fit(phase: Phase, amp: Amplitude, lambda_grid, threads: int = 1, seed: int = 0) -> DecayFitResult:
    """Least-squares slope of ln ||T_lam|| against ln lam; sigma is minus the slope."""
    grid = _check_dyadic(lambda_grid)
    norms = deterministic_map(lambda lam: operator_norm(phase, amp, lam, seed=seed), grid, threads)
    fit = linregress(np.log(grid), np.log(norms))
    r_squared = float(fit.rvalue) ** 2
    if not math.isfinite(r_squared):
        r_squared = 0.0
    sigma = -float(fit.slope)
    logger.info("decay fit %s: sigma=%.4f r^2=%.4f over lambda %g..%g", phase.name, sigma, r_squared, grid[0], grid[-1])
    return DecayFitResult(lambda_grid=grid, norms=[float(v) for v in norms], sigma=sigma, r_squared=min(1.0, r_squared))


# --- explicit constants ---

def _numeric_critical(phase: Phase, fixed: np.ndarray, lo: float, hi: float, along_t: bool) -> np.ndarray:
    """Unique root of phi_st along t (or s) for each fixed value; NaN when absent or not unique."""
    out = np.full(fixed.shape, np.nan)
    grid = np.linspace(lo, hi, 129)
    for k, value in enumerate(fixed):
        if along_t:
            values = phase.mixed(grid, np.full_like(grid, value))
        else:
            values = phase.mixed(np.full_like(grid, value), grid)
        signs = np.sign(values)
        changes = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
        if changes.size != 1:
            continue
        i = changes[0]
        if along_t:
            fn = lambda x: float(phase.mixed(np.array([x]), np.array([value]))[0])  # noqa: E731
        else:
            fn = lambda x: float(phase.mixed(np.array([value]), np.array([x]))[0])  # noqa: E731
        out[k] = brentq(fn, grid[i], grid[i + 1], xtol=1e-14)
    return out


def _derivative_sum(amp_norms: dict, mixed: np.ndarray, axis_values: np.ndarray, axis: int, key: str) -> float:
    total = 0.0
    derivative = mixed
    phi_norms = [float(np.max(np.abs(mixed)))]
    for _ in (1, 2):
        derivative = np.gradient(derivative, axis_values, axis=axis)
        phi_norms.append(float(np.max(np.abs(derivative))))
    for i in range(3):
        for j in range(3):
            total += amp_norms[(key, i)] * phi_norms[j]
    return total


def bound_constants(
    phase: Phase,
    amp: Amplitude,
    geometry: ZeroSetGeometry | None = None,
    grid_n: int = 201,
    fold_skip: float = 1e-10,
) -> BoundConstants:
    """
    C = diam^{1/2} {||a|| + S_t / inf|phi_st|^2},
    C' = diam^{1/4} {||a|| + S_t / inf|phi_st / (t - t_c(s))|^2},
    C'' = diam^{1/4} {||a|| + S_s / inf|phi_st / (s - s_c(t))|^2},
    S_t = sum_{i,j<=2} ||d_t^i a|| ||d_t^j phi_st|| and S_s likewise in s.
    Suprema and infima are taken over grid points where a does not vanish.
    """
    t0, t1, s0, s1 = amp.support
    t = np.linspace(t0, t1, grid_n)
    s = np.linspace(s0, s1, grid_n)
    tt, ss = np.meshgrid(t, s, indexing="ij")
    support = np.abs(np.asarray(amp(tt, ss), float)) > 0.0
    mixed = np.asarray(phase.mixed(tt, ss), float)
    abs_mixed = np.abs(mixed)

    a_sup = amp.sup_norms[("t", 0)]
    t_sum = _derivative_sum(amp.sup_norms, mixed, t, 0, "t")
    s_sum = _derivative_sum(amp.sup_norms, mixed, s, 1, "s")
    scale = float(abs_mixed[support].max()) if support.any() else 0.0

    inf_mixed = float(abs_mixed[support].min()) if support.any() else 0.0
    degenerate = inf_mixed <= 1e-12 * max(scale, 1.0)
    c_main = math.inf if degenerate else math.sqrt(amp.diam) * (a_sup + t_sum / inf_mixed ** 2)

    # Fold along t: t_c(s) from the closed form, the zero-set geometry, or a root search
    if geometry is not None and not geometry.empty:
        tc = zs.critical_t_array(s, geometry)
        sc = zs.critical_s_array(t, geometry)
    else:
        tc = phase.critical_t(s) if phase.critical_t is not None else _numeric_critical(phase, s, t0, t1, True)
        sc = phase.critical_s(t) if phase.critical_s is not None else _numeric_critical(phase, t, s0, s1, False)
    tc = np.broadcast_to(np.asarray(tc, float), s.shape)
    sc = np.broadcast_to(np.asarray(sc, float), t.shape)

    inf_fold_t = _fold_infimum(abs_mixed, np.abs(tt - tc[None, :]), support, np.isfinite(tc)[None, :], fold_skip)
    inf_fold_s = _fold_infimum(abs_mixed, np.abs(ss - sc[:, None]), support, np.isfinite(sc)[:, None], fold_skip)
    c_prime = math.inf if not inf_fold_t else amp.diam ** 0.25 * (a_sup + t_sum / inf_fold_t ** 2)
    c_double = math.inf if not inf_fold_s else amp.diam ** 0.25 * (a_sup + s_sum / inf_fold_s ** 2)

    return BoundConstants(
        C=c_main,
        C_prime=c_prime,
        C_double_prime=c_double,
        diam=amp.diam,
        a_sup=a_sup,
        t_sum=t_sum,
        s_sum=s_sum,
        inf_phi_st=inf_mixed,
        inf_fold_t=inf_fold_t,
        inf_fold_s=inf_fold_s,
    )


def _fold_infimum(abs_mixed, gap, support, defined, fold_skip: float) -> float | None:
    """inf |phi_st| / gap over the support; None unless every line of the support has a critical point."""
    lines_ok = np.broadcast_to(defined, support.shape)
    if not support.any() or not lines_ok[support].all():
        return None
    usable = support & (gap >= fold_skip)
    if not usable.any():
        return None
    value = float((abs_mixed[usable] / gap[usable]).min())
    return value if value > 0.0 else None
