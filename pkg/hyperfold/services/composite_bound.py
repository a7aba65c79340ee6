"""
Assembly of the S_lam^osc estimate from the four-part decomposition of
[0,1] x I, and the parameter law T = c log(lam) that turns it into the
lam / log(lam) bound.
"""

import logging
import math

import numpy as np

from hyperfold.exceptions import DomainError
from hyperfold.models.geometry_models import PhaseParams, RegionLabel
from hyperfold.models.result_models import CompositeAudit, ParameterLawAudit, PieceEstimate
from hyperfold.services import oscillatory_operator as oo
from hyperfold.services import phase_audits
from hyperfold.services import zero_set as zs
from hyperfold.utils.numerics import cos2_ramp, smooth_step

logger = logging.getLogger(__name__)

DEFAULT_AUDIT_GRID = 128
LAW_SPREAD = 4.0


class ModelAmplitude:
    """
    Radial amplitude a(r) = T^{-1} lam (1 + r)^{-1} psi(r), psi switching on
    over [1, 2] and off over [T, T + 1]. It obeys |d_r^j a| <= C_j T^{-1} lam r^{-1-j}.
    """

    def __init__(self, T: float, lam: float):
        if T < 2.0 or not lam > 0.0:
            raise DomainError(f"model amplitude needs T >= 2 and lambda > 0, got T={T!r}, lambda={lam!r}")
        self.T = T
        self.lam = lam

    def window(self, r):
        r = np.asarray(r, dtype=float)
        flat = r.ravel()
        return (smooth_step(flat - 1.0) * smooth_step(self.T + 1.0 - flat)).reshape(r.shape)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.lam / self.T / (1.0 + r) * self.window(r)

    def derivative_constants(self, j_max: int = 2, n: int = 20001) -> dict[int, float]:
        """Sampled C_j = sup |d_r^j a| T r^{1+j} / lam on [1, T + 1]."""
        r = np.linspace(1.0, self.T + 1.0, n)
        values = self(r)
        constants = {}
        for j in range(j_max + 1):
            constants[j] = float(np.max(np.abs(values) * self.T * r ** (1 + j) / self.lam))
            values = np.gradient(values, r)
        return constants


# --- partition of unity ---

def partition_weights(t, s, p: PhaseParams, eps: float) -> dict[str, np.ndarray]:
    """
    Smooth weights of the four regions, built from squared-cosine ramps of
    width eps/2 across the eps-neighbourhood of Z and the fold thresholds.
    They sum to one.
    """
    t, s = np.broadcast_arrays(np.asarray(t, float), np.asarray(s, float))
    z = zs.zero_geometry(p)
    if z.empty:
        zero = np.zeros(t.shape)
        return {
            RegionLabel.NON_STATIONARY.value: np.ones(t.shape),
            RegionLabel.LEFT_FOLD.value: zero,
            RegionLabel.RIGHT_FOLD.value: zero,
            RegionLabel.YOUNG_PART.value: zero,
        }

    width = 0.5 * eps
    near = cos2_ramp(eps - zs.distance_to_zero_set(t, s, z, eps), width)
    th = zs.fold_thresholds(p, eps)
    left = np.clip(
        cos2_ramp(s - 0.5 * math.log(th["s_upper"]), width) + cos2_ramp(0.5 * math.log(th["s_lower"]) - s, width),
        0.0,
        1.0,
    )
    right = np.clip(
        cos2_ramp(t - 0.5 * math.log(th["t_upper"]), width) + cos2_ramp(0.5 * math.log(th["t_lower"]) - t, width),
        0.0,
        1.0,
    )
    left_w = near * left
    right_w = near * (1.0 - left) * right
    young_w = near * (1.0 - left) * (1.0 - right)
    return {
        RegionLabel.NON_STATIONARY.value: 1.0 - near,
        RegionLabel.LEFT_FOLD.value: left_w,
        RegionLabel.RIGHT_FOLD.value: right_w,
        RegionLabel.YOUNG_PART.value: young_w,
    }


def partition_error(p: PhaseParams, eps: float, grid_n: int = DEFAULT_AUDIT_GRID) -> float:
    tt, ss = phase_audits.audit_grid(p, grid_n)
    weights = partition_weights(tt, ss, p, eps)
    return float(np.max(np.abs(sum(weights.values()) - 1.0)))


def piece_references(lam: float, eps: float) -> dict[str, float]:
    """eps lam for the Young part, eps^-2 lam^{3/4} per fold part, eps^-4 lam^{1/2} off Z."""
    fold = eps ** -2 * lam ** 0.75
    return {
        RegionLabel.NON_STATIONARY.value: eps ** -4 * lam ** 0.5,
        RegionLabel.LEFT_FOLD.value: fold,
        RegionLabel.RIGHT_FOLD.value: fold,
        RegionLabel.YOUNG_PART.value: eps * lam,
    }


def _implied(norm: float, reference: float, T: float) -> float | None:
    if norm <= 0.0:
        return None
    return math.log(norm / reference) / T


def composite_bound_audit(
    p: PhaseParams,
    lam: float,
    T: float,
    eps: float,
    grid_n: int = phase_audits.DEFAULT_GRID_N,
    R: float = 1.0,
    seed: int = 0,
) -> CompositeAudit:
    """
    Operator norm of T_lam with the geodesic phase and amplitude
    a(T, lam; phi) restricted to each region by the partition weights, set
    against e^{CT}(eps lam + eps^-2 lam^{3/4} + eps^-4 lam^{1/2}).
    """
    if not 0.0 < eps < 0.25:
        raise DomainError(f"eps must lie in (0, 1/4), got {eps!r}")
    phase_audits.check_preconditions(p, T, grid_n, R)

    model = ModelAmplitude(T, lam)
    phase = oo.geodesic_phase(p)
    s_lo, s_hi = p.s_interval
    support = (0.0, 1.0, s_lo, s_hi)
    references = piece_references(lam, eps)

    pieces = []
    for label in RegionLabel:
        name = label.value

        def fn(t, s, name=name):
            weight = partition_weights(t, s, p, eps)[name]
            return weight * model(phase(t, s))

        amp = oo.Amplitude(fn=fn, support=support)
        norm = oo.operator_norm(phase, amp, lam, seed=seed)
        pieces.append(PieceEstimate(
            region=name,
            norm=norm,
            reference=references[name],
            implied_C=_implied(norm, references[name], T),
        ))
        logger.debug("composite %s: norm %.6g against %.6g", name, norm, references[name])

    total = sum(piece.norm for piece in pieces)
    reference_total = eps * lam + eps ** -2 * lam ** 0.75 + eps ** -4 * lam ** 0.5
    audit = CompositeAudit(
        lam=lam,
        T=T,
        eps=eps,
        pieces=pieces,
        total=total,
        reference_total=reference_total,
        implied_C=_implied(total, reference_total, T),
        partition_error=partition_error(p, eps),
    )
    logger.info("composite bound lambda=%g T=%g eps=%g: total %.6g, implied C %s", lam, T, eps, total, audit.implied_C)
    return audit


# --- parameter law ---

def law_bound(lam: float, C: float, c: float) -> dict[str, float]:
    """The assembled bound at T = c log(lam), eps = e^{-CT} / T."""
    T = c * math.log(lam)
    eps = math.exp(-C * T) / T
    bound = math.exp(C * T) * (eps * lam + eps ** -2 * lam ** 0.75 + eps ** -4 * lam ** 0.5)
    return {"lambda": lam, "T": T, "eps": eps, "bound": bound, "ratio": bound / (lam / math.log(lam))}


def parameter_law_audit(C: float, c: float | None = None, lambda_grid=None) -> ParameterLawAudit:
    """
    bound / (lam / log lam) over the grid; it stays within a factor
    LAW_SPREAD when c < 1/(12 C). c defaults to 1/(24 C).
    """
    if not C > 0.0:
        raise DomainError(f"C must be positive, got {C!r}")
    if c is None:
        c = 1.0 / (24.0 * C)
    if lambda_grid is None:
        lambda_grid = [2.0 ** k for k in range(8, 15)]
    rows = [law_bound(float(lam), C, c) for lam in lambda_grid]
    ratios = [row["ratio"] for row in rows]
    spread = max(ratios) / min(ratios)
    logger.info("parameter law C=%g c=%g: bound/(lambda/log lambda) spread %.4g", C, c, spread)
    return ParameterLawAudit(C=C, c=c, rows=rows, spread=spread, passed=spread <= LAW_SPREAD)
