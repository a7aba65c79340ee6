"""
Empirical audits of the phase estimates on [0,1] x I:

- admissibility: range of phi and the four bounds implied by 2 <= phi <= T
- tube proxy: the circle geodesic must not stay inside the R-tube over the
  whole parameter window forced by phi <= T
- lemma1_audit: lower bounds of |phi_st| and of the fold ratios per region
- lemma2_audit: sup norms of mixed derivatives of phi up to order 4

Audits report implied constants instead of asserting unknown ones.
"""

import logging
import math

import numpy as np
from scipy.optimize import minimize

from hyperfold.exceptions import PreconditionError
from hyperfold.models.geometry_models import PhaseParams, RegionLabel, Tube
from hyperfold.models.result_models import (
    AdmissibilityReport,
    DerivativeSup,
    Lemma1Audit,
    Lemma2Audit,
    RegionMinimum,
)
from hyperfold.services import halfspace_geometry as geo
from hyperfold.services import phase_function as pf
from hyperfold.services import zero_set as zs

logger = logging.getLogger(__name__)

DEFAULT_GRID_N = 512
FOLD_SKIP = 1e-10
MAX_MIXED_ORDER = 4

# Mixed multi-indices (i, j), i, j >= 1; pure derivatives are not needed
MIXED_INDICES = ((1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (3, 1))


def audit_grid(p: PhaseParams, grid_n: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform grid_n x grid_n mesh of [0,1] x I, indexed [t, s]."""
    s_lo, s_hi = p.s_interval
    t = np.linspace(0.0, 1.0, grid_n)
    s = np.linspace(s_lo, s_hi, grid_n)
    return np.meshgrid(t, s, indexing="ij")


# --- admissibility ---

def admissibility(p: PhaseParams, T: float, grid_n: int = DEFAULT_GRID_N) -> AdmissibilityReport:
    """Range of phi on [0,1] x I by dense grid plus local refinement, and the four implied bounds."""
    tt, ss = audit_grid(p, grid_n)
    values = pf.phi_array(tt, ss, p)
    grid_min = float(values.min())
    grid_max = float(values.max())

    s_lo, s_hi = p.s_interval
    bounds = [(0.0, 1.0), (s_lo, s_hi)]

    def objective(x, sign):
        return sign * pf.phi(x[0], x[1], p)

    i_min = np.unravel_index(np.argmin(values), values.shape)
    i_max = np.unravel_index(np.argmax(values), values.shape)
    res_min = minimize(objective, x0=[tt[i_min], ss[i_min]], args=(1.0,), method="L-BFGS-B", bounds=bounds)
    res_max = minimize(objective, x0=[tt[i_max], ss[i_max]], args=(-1.0,), method="L-BFGS-B", bounds=bounds)
    phi_min = min(grid_min, float(res_min.fun))
    phi_max = max(grid_max, -float(res_max.fun))

    cosh_t = math.cosh(T)
    bounds_ok = {
        "segment": p.r / (4.0 * cosh_t) <= math.exp(s_lo) and math.exp(s_hi) <= 4.0 * p.r * cosh_t,
        "a_r_bound": p.a / p.r <= 2.0 * math.e * cosh_t,
        "d1_bound": p.d1 <= 2.0 * math.e * cosh_t,
        "r_lower_bound": p.r >= 1.0 / (2.0 * cosh_t),
    }
    admissible = phi_min >= 2.0 and phi_max <= T and all(bounds_ok.values())
    logger.info(
        "admissibility a=%g r=%g beta=%g T=%g: phi in [%.6g, %.6g] admissible=%s",
        p.a, p.r, p.beta, T, phi_min, phi_max, admissible,
    )
    return AdmissibilityReport(
        phi_min=phi_min,
        phi_max=phi_max,
        T=T,
        bounds_ok=bounds_ok,
        admissible=admissible,
        refined_phi_min=float(res_min.fun),
    )


# --- tube proxy for the deck-group hypothesis ---

def tube_window(p: PhaseParams, T: float) -> tuple[float, float]:
    """Window of e^{2s} forced by phi <= T: [r^2 / (16 cosh^2 T), 16 r^2 cosh^2 T]."""
    cosh_t = math.cosh(T)
    return (p.r * p.r / (16.0 * cosh_t * cosh_t), 16.0 * p.r * p.r * cosh_t * cosh_t)


def tube_proxy_ok(p: PhaseParams, T: float, R: float = 1.0) -> bool:
    """False when gamma2 stays in the R-tube over the whole window (the excluded configuration)."""
    interval = geo.tube_interval(p.geodesic, Tube(R))
    if interval is None:
        return True
    lo, hi = tube_window(p, T)
    return not (interval[0] <= lo and interval[1] >= hi)


def tube_claim_check(p: PhaseParams, T: float, R: float = 1.0) -> dict:
    """
    Outside the excluded configuration, r <= C cosh T or d1 >= 1/(C cosh T)
    with C = 4 sqrt(cosh R + 2) / sqrt(cosh R).
    """
    cosh_r = math.cosh(R)
    cosh_t = math.cosh(T)
    big_c = 4.0 * math.sqrt(cosh_r + 2.0) / math.sqrt(cosh_r)
    proxy = tube_proxy_ok(p, T, R)
    r_small = p.r <= big_c * cosh_t
    d1_large = p.d1 >= 1.0 / (big_c * cosh_t)
    return {
        "C": big_c,
        "proxy_ok": proxy,
        "r_small": r_small,
        "d1_large": d1_large,
        "holds": (not proxy) or r_small or d1_large,
    }


def check_preconditions(p: PhaseParams, T: float, grid_n: int = DEFAULT_GRID_N, R: float = 1.0) -> AdmissibilityReport:
    """Raise PreconditionError naming every violated bound; return the admissibility report otherwise."""
    report = admissibility(p, T, grid_n)
    violations = report.violations()
    if not tube_proxy_ok(p, T, R):
        violations.append(f"gamma2 stays in the R={R:g} tube over the whole parameter window")
    if violations:
        logger.error("Preconditions failed for a=%g r=%g beta=%g: %s", p.a, p.r, p.beta, violations)
        raise PreconditionError(violations)
    return report


def proof_case(p: PhaseParams, T: float, R: float = 1.0) -> str:
    """
    Which branch of the lower-bound argument the parameters fall in.
    Diagnostic only: I when r <= a cos b, II(i) when r <= C cosh^7 T, II(ii) otherwise.
    """
    if p.r <= p.a * p.cos_beta:
        return "I"
    big_c = tube_claim_check(p, T, R)["C"]
    return "II(i)" if p.r <= big_c * math.cosh(T) ** 7 else "II(ii)"


# --- region bounds on |phi_st| ---

def _implied(minimum: float | None, reference: float, T: float) -> float | None:
    if minimum is None or minimum <= 0.0:
        return None
    return -math.log(minimum / reference) / T


def lemma1_audit(
    p: PhaseParams,
    T: float,
    eps: float,
    grid_n: int = DEFAULT_GRID_N,
    R: float = 1.0,
) -> Lemma1Audit:
    """
    Grid minima of |phi_st| on NonStationary, |phi_st|/|t - t_c(s)| on LeftFold
    and |phi_st|/|s - s_c(t)| on RightFold, with implied constants
    C1 = -ln(min/eps^2)/T and C2, C3 = -ln(min/eps)/T.
    """
    check_preconditions(p, T, grid_n, R)
    tt, ss = audit_grid(p, grid_n)
    mixed = np.abs(pf.phi_st_array(tt, ss, p))
    codes = zs.region_codes(tt, ss, p, eps)
    z = zs.zero_geometry(p)

    regions = []
    mask = codes == zs.REGION_CODE[RegionLabel.NON_STATIONARY]
    ns_min = float(mixed[mask].min()) if mask.any() else None
    regions.append(RegionMinimum(
        region=RegionLabel.NON_STATIONARY.value,
        quantity="|phi_st|",
        minimum=ns_min,
        points=int(mask.sum()),
        labelled=int(mask.sum()),
        implied_C=_implied(ns_min, eps * eps, T),
    ))

    for label, quantity in (
        (RegionLabel.LEFT_FOLD, "|phi_st|/|t-t_c(s)|"),
        (RegionLabel.RIGHT_FOLD, "|phi_st|/|s-s_c(t)|"),
    ):
        mask = codes == zs.REGION_CODE[label]
        minimum = None
        count = 0
        if mask.any() and not z.empty:
            if label is RegionLabel.LEFT_FOLD:
                gap = np.abs(tt[mask] - zs.critical_t_array(ss[mask], z))
            else:
                gap = np.abs(ss[mask] - zs.critical_s_array(tt[mask], z))
            usable = np.isfinite(gap) & (gap >= FOLD_SKIP)
            count = int(usable.sum())
            if count:
                minimum = float((mixed[mask][usable] / gap[usable]).min())
            else:
                logger.warning("lemma1 %s: %d labelled points, none usable", label.value, int(mask.sum()))
        regions.append(RegionMinimum(
            region=label.value,
            quantity=quantity,
            minimum=minimum,
            points=count,
            labelled=int(mask.sum()),
            implied_C=_implied(minimum, eps, T),
        ))

    audit = Lemma1Audit(
        T=T,
        eps=eps,
        grid_n=grid_n,
        regions=regions,
        proof_case=proof_case(p, T, R),
        zero_set_empty=z.empty,
    )
    for entry in regions:
        logger.info("lemma1 %s: min %s = %s (implied C %s)", entry.region, entry.quantity, entry.minimum, entry.implied_C)
    return audit


# --- mixed derivative bounds ---

def _fd_step(order: int) -> float:
    return 0.02 * 1.5 ** (order - 2)


def lemma2_audit(
    p: PhaseParams,
    T: float,
    max_order: int = MAX_MIXED_ORDER,
    grid_n: int = DEFAULT_GRID_N,
    R: float = 1.0,
) -> Lemma2Audit:
    """
    Sup norms of the mixed derivatives D^(i,j) phi, i + j <= max_order,
    with implied C_alpha = ln(sup)/T. Also reports the decomposition
    phi_st = 16 r e^{2s+2t} G E^{-3/2}: sup |G| and inf E.
    """
    if max_order > MAX_MIXED_ORDER:
        raise PreconditionError([f"max_order={max_order} exceeds {MAX_MIXED_ORDER}"])
    check_preconditions(p, T, grid_n, R)
    tt, ss = audit_grid(p, grid_n)

    sups = []
    for alpha in MIXED_INDICES:
        order = alpha[0] + alpha[1]
        if order > max_order:
            continue
        values = pf.mixed_derivative_fd(tt, ss, p, alpha, _fd_step(order))
        sup = float(np.max(np.abs(values)))
        sups.append(DerivativeSup(alpha=alpha, sup=sup, implied_C=math.log(sup) / T))
        logger.debug("lemma2 alpha=%s sup=%.6g", alpha, sup)

    closed_sup = float(np.max(np.abs(pf.phi_st_array(tt, ss, p))))
    numerator = pf.bracket_numerator(tt, ss, p)
    e2 = np.exp(2.0 * (tt + ss))
    denominator = pf.big_a(tt, ss, p) ** 2 - 16.0 * p.r * p.r * e2
    return Lemma2Audit(
        T=T,
        max_order=max_order,
        grid_n=grid_n,
        sups=sups,
        closed_form_phi_st_sup=closed_sup,
        numerator_sup=float(np.max(np.abs(numerator))),
        denominator_inf=float(np.min(denominator)),
    )
