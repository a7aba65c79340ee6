"""
Small numerical building blocks shared by the services: composite
Gauss-Legendre rules and C-infinity smooth steps.
"""

import math
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss


@lru_cache(maxsize=32)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the order-point Gauss-Legendre rule on [-1, 1]."""
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def composite_gauss_legendre(breaks, order: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Nodes and weights of a composite rule with one order-point panel per
    consecutive pair of ``breaks``.
    """
    breaks = np.asarray(breaks, dtype=float)
    x, w = gauss_legendre(order)
    lo = breaks[:-1, None]
    half = 0.5 * np.diff(breaks)[:, None]
    nodes = lo + half * (x[None, :] + 1.0)
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


def panel_breaks(a: float, b: float, max_width: float, cuts=()) -> np.ndarray:
    """
    Break points covering [a, b] with every panel at most max_width wide and
    every interior cut in ``cuts`` present as a break point.
    """
    points = [a] + sorted(c for c in cuts if a < c < b) + [b]
    pieces = []
    for lo, hi in zip(points[:-1], points[1:]):
        n = max(1, math.ceil((hi - lo) / max_width))
        pieces.append(np.linspace(lo, hi, n + 1)[:-1])
    pieces.append(np.array([b]))
    return np.concatenate(pieces)


def gauss_legendre_interval(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """n-point Gauss-Legendre rule mapped to [a, b]."""
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


# --- smooth steps ---

def _psi(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0.0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def _psi_prime(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0.0
    out[pos] = np.exp(-1.0 / x[pos]) / (x[pos] * x[pos])
    return out


def smooth_step(x) -> np.ndarray:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a = _psi(x)
    b = _psi(1.0 - x)
    return a / (a + b)


def smooth_step_prime(x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    a = _psi(x)
    b = _psi(1.0 - x)
    da = _psi_prime(x)
    db = _psi_prime(1.0 - x)
    # d/dx [a / (a + b)] with b' = -db
    return (da * b + a * db) / (a + b) ** 2


def cos2_ramp(x, width: float) -> np.ndarray:
    """
    C^1 ramp from 0 (x <= -width/2) to 1 (x >= width/2) by sin^2 blending.
    """
    x = np.asarray(x, dtype=float)
    y = np.clip(x / width + 0.5, 0.0, 1.0)
    return np.sin(0.5 * math.pi * y) ** 2


def fd4_derivative(fn, x, h: float | None = None):
    """Fourth-order central first derivative of a scalar callable."""
    if h is None:
        h = 1e-3 * max(1.0, abs(x))
    return (fn(x - 2 * h) - 8.0 * fn(x - h) + 8.0 * fn(x + h) - fn(x + 2 * h)) / (12.0 * h)
