"""
Subcommand runners behind the CLI. Each runner writes its products under
the output directory and returns a SubcommandResult; the exit status is 0
on success and 2 when an audit threshold fails. Products depend only on
the configuration, never on the thread count.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from hyperfold.exceptions import PreconditionError
from hyperfold.models.config_models import ScenarioConfig
from hyperfold.models.result_models import AuditOutcome
from hyperfold.services import composite_bound as cb
from hyperfold.services import oscillatory_operator as oo
from hyperfold.services import phase_audits
from hyperfold.services import phase_function as pf
from hyperfold.services import special_functions as sf
from hyperfold.services import wave_kernel as wk
from hyperfold.services import zero_set as zs
from hyperfold.services.scenario_registry import SIGMA_RANGES
from hyperfold.utils.helpers import write_csv, write_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_AUDIT = 2

IMPLIED_C_LIMIT = 25.0
DERIVATIVE_RTOL = 1e-7
LEMMA2_RTOL = 1e-6
BESSEL_OVERLAP_TOL = 1e-8
KERNEL_SPREAD = 8.0
KERNEL_MEDIAN_EXCESS = 10.0
RELATION_RTOL = 1e-6
PARTITION_TOL = 1e-12
DERIVATIVE_SAMPLES = 2000

PHASE_HEADER = ("t", "s", "phi", "phi_st", "region")
LEMMA1_HEADER = ("eps", "region", "quantity", "minimum", "points", "labelled", "implied_C")
LEMMA2_HEADER = ("alpha_t", "alpha_s", "sup", "implied_C")
KERNEL_HEADER = ("r", "lambda", "T", "re", "im", "bound_ratio")
DECAY_HEADER = ("lambda", "opnorm")
COMPOSITE_HEADER = ("region", "norm", "reference", "implied_C")
AUDIT_HEADER = ("name", "passed", "measured", "threshold", "details")


@dataclass
class SubcommandResult:
    name: str
    outcomes: list[AuditOutcome] = field(default_factory=list)
    files: list[Path] = field(default_factory=list)
    message: str = ""

    @property
    def status(self) -> int:
        return EXIT_OK if all(o.passed for o in self.outcomes) else EXIT_AUDIT


def _na(value) -> float:
    return math.inf if value is None else float(value)


# --- phase ---

def run_phase(config: ScenarioConfig, out: Path) -> SubcommandResult:
    p = config.phase_params()
    tt, ss = phase_audits.audit_grid(p, config.grid_n)
    values = pf.phi_array(tt, ss, p)
    mixed = pf.phi_st_array(tt, ss, p)
    codes = zs.region_codes(tt, ss, p, config.epsilon)
    rows = (
        (tt.flat[k], ss.flat[k], values.flat[k], mixed.flat[k], zs.REGION_ORDER[codes.flat[k]].value)
        for k in range(tt.size)
    )
    result = SubcommandResult("phase")
    result.files.append(write_csv(out / "phase_surface.csv", PHASE_HEADER, rows))

    z = zs.zero_geometry(p)
    result.files.append(write_json(out / "zero_geometry.json", z.to_dict()))
    if not z.empty:
        xyb = abs(z.X0 * z.Y0 - z.B - z.d2_sq) / z.d2_sq
        result.outcomes.append(AuditOutcome.at_most("zero_set.XYB_identity", xyb, 1e-12))
    return result


def derivative_outcome(config: ScenarioConfig) -> AuditOutcome:
    """Closed-form phi_st against Richardson finite differences at seeded random points."""
    p = config.phase_params()
    rng = np.random.default_rng(config.seed)
    s_lo, s_hi = p.s_interval
    t = rng.uniform(0.0, 1.0, DERIVATIVE_SAMPLES)
    s = rng.uniform(s_lo, s_hi, DERIVATIVE_SAMPLES)
    closed = pf.phi_st_array(t, s, p)
    scale = pf.phi_st_scale(t, s, p)
    worst = 0.0
    for k in range(DERIVATIVE_SAMPLES):
        numeric = pf.phi_st_numeric(float(t[k]), float(s[k]), p, h=config.fd_step)
        worst = max(worst, abs(numeric - closed[k]) / scale[k])
    return AuditOutcome.at_most("phase.phi_st_vs_fd", worst, DERIVATIVE_RTOL, f"{DERIVATIVE_SAMPLES} samples")


# --- bounds ---

def run_bounds(config: ScenarioConfig, out: Path) -> SubcommandResult:
    p = config.phase_params()
    T = config.T
    eps = config.epsilon
    result = SubcommandResult("bounds")
    try:
        audits = [
            phase_audits.lemma1_audit(p, T, e, config.grid_n, config.tube_R) for e in (eps, 0.5 * eps)
        ]
        lemma2 = phase_audits.lemma2_audit(p, T, grid_n=config.grid_n, R=config.tube_R)
    except PreconditionError as exc:
        result.outcomes.append(AuditOutcome(name="bounds.preconditions", passed=False, measured=math.nan,
                                            threshold=0.0, details=str(exc)))
        return result

    rows = []
    for audit in audits:
        for entry in audit.regions:
            rows.append((audit.eps, entry.region, entry.quantity, _na(entry.minimum), entry.points, entry.labelled,
                         _na(entry.implied_C)))
            if not entry.covered:
                result.outcomes.append(AuditOutcome(
                    name=f"lemma1.{entry.region}.coverage.eps={audit.eps:g}", passed=False, measured=0.0,
                    threshold=1.0, details=f"{entry.labelled} labelled points, none audited",
                ))
            if entry.points:
                result.outcomes.append(AuditOutcome.at_most(
                    f"lemma1.{entry.region}.eps={audit.eps:g}", _na(entry.implied_C), IMPLIED_C_LIMIT, entry.quantity,
                ))
    result.files.append(write_csv(out / "lemma1_audit.csv", LEMMA1_HEADER, rows))

    coarse, fine = (a.region("NonStationary").minimum for a in audits)
    if coarse is not None and fine is not None:
        result.outcomes.append(AuditOutcome.at_most("lemma1.eps_halving_monotone", fine - coarse, 0.0,
                                                    "min over NS(eps/2) <= min over NS(eps)"))

    rows = [(d.alpha[0], d.alpha[1], d.sup, d.implied_C) for d in lemma2.sups]
    result.files.append(write_csv(out / "lemma2_audit.csv", LEMMA2_HEADER, rows))
    fd_sup = lemma2.sup_for((1, 1)).sup
    agreement = abs(fd_sup - lemma2.closed_form_phi_st_sup) / lemma2.closed_form_phi_st_sup
    result.outcomes.append(AuditOutcome.at_most("lemma2.phi_st_sup_agreement", agreement, LEMMA2_RTOL))
    for d in lemma2.sups:
        result.outcomes.append(AuditOutcome.at_most(f"lemma2.C_{d.alpha[0]}{d.alpha[1]}", d.implied_C, IMPLIED_C_LIMIT))
    return result


# --- kernel ---

def run_kernel(config: ScenarioConfig, out: Path, threads: int = 1) -> SubcommandResult:
    cut = wk.make_cutoffs(config.cutoff_shape)
    r_values = range(1, int(max(config.kernel_T_grid)) + 1)
    sweep = wk.kernel_ratio_sweep(r_values, config.kernel_lambda_grid, config.kernel_T_grid, cut, threads=threads)
    rows = [tuple(row[h] for h in KERNEL_HEADER) for row in sweep.rows]
    result = SubcommandResult("kernel")
    result.files.append(write_csv(out / "kalpha.csv", KERNEL_HEADER, rows))
    result.message = f"kernel bound ratio implied C: {sweep.implied_C:.6g}"
    result.outcomes.append(AuditOutcome.at_most(
        "kernel.bound_ratio_spread", sweep.stability, KERNEL_SPREAD, "per-T sup over r in [1, T-1] and lambda",
    ))
    result.outcomes.append(AuditOutcome.at_most(
        "kernel.bound_ratio_over_median", sweep.median_excess, KERNEL_MEDIAN_EXCESS, "per-(lambda, T) sups",
    ))
    return result


def relation_outcome() -> AuditOutcome:
    """Direct wave-kernel pairing against the transmutation oracle on Gaussian bumps."""
    width = 0.1
    worst = 0.0
    for r in (2.0, 4.0, 8.0):
        for offset in (1.0, 2.0, 3.0):
            center = r + offset

            def bump(t, center=center):
                return math.exp(-0.5 * ((t - center) / width) ** 2)

            def bump_prime(t, center=center):
                return -(t - center) / width ** 2 * bump(t)

            support = (center - 10 * width, center + 10 * width)
            direct = wk.wave_pairing(bump, r, support, bump_prime)
            oracle = wk.relation_oracle(bump, r, support, bump_prime)
            worst = max(worst, abs(direct - oracle) / abs(oracle))
    return AuditOutcome.at_most("kernel.relation_cross_check", worst, RELATION_RTOL)


# --- decay ---

def run_decay(config: ScenarioConfig, out: Path, threads: int = 1) -> SubcommandResult:
    phase = oo.MODEL_PHASES[config.decay_phase]()
    amp = oo.plateau_amplitude()
    fit = oo.decay_fit(phase, amp, config.lambda_grid, threads=threads, seed=config.seed)
    result = SubcommandResult("decay")
    result.files.append(write_csv(out / "decay.csv", DECAY_HEADER, zip(fit.lambda_grid, fit.norms)))
    result.files.append(write_json(out / "fit.json", {
        "sigma": fit.sigma,
        "r_squared": fit.r_squared,
        "phase": config.decay_phase,
        "lambda_grid": fit.lambda_grid,
    }))
    lo, hi = SIGMA_RANGES[config.decay_phase]
    result.outcomes.append(AuditOutcome.within(f"decay.sigma.{config.decay_phase}", fit.sigma, lo, hi))
    return result


# --- bessel ---

def run_bessel(config: ScenarioConfig, out: Path) -> SubcommandResult:
    worst = sf.regime_overlap_error()
    result = SubcommandResult("bessel", message=f"J1 series/asymptotic overlap max relative error: {worst:.3e}")
    result.outcomes.append(AuditOutcome.at_most("bessel.regime_overlap", worst, BESSEL_OVERLAP_TOL, "v in [10, 14]"))
    return result


# --- composite ---

def run_composite(config: ScenarioConfig, out: Path) -> SubcommandResult:
    p = config.phase_params()
    result = SubcommandResult("composite")
    try:
        audit = cb.composite_bound_audit(p, config.composite_lambda, config.T, config.epsilon,
                                         grid_n=config.grid_n, R=config.tube_R, seed=config.seed)
    except PreconditionError as exc:
        result.outcomes.append(AuditOutcome(name="composite.preconditions", passed=False, measured=math.nan,
                                            threshold=0.0, details=str(exc)))
        return result
    rows = [(piece.region, piece.norm, piece.reference, _na(piece.implied_C)) for piece in audit.pieces]
    rows.append(("total", audit.total, audit.reference_total, _na(audit.implied_C)))
    result.files.append(write_csv(out / "composite.csv", COMPOSITE_HEADER, rows))
    result.outcomes.append(AuditOutcome.at_most("composite.implied_C", _na(audit.implied_C), IMPLIED_C_LIMIT))
    result.outcomes.append(AuditOutcome.at_most("composite.partition_of_unity", audit.partition_error, PARTITION_TOL))

    law = cb.parameter_law_audit(config.law_C, config.law_c)
    result.outcomes.append(AuditOutcome.at_most("composite.parameter_law_spread", law.spread, cb.LAW_SPREAD,
                                                f"C={law.C:g}, c={law.c:.6g}"))
    return result


# --- audit ---

def run_audit(config: ScenarioConfig, out: Path, threads: int = 1) -> SubcommandResult:
    """Every subcommand plus the cross-checks, summarised in audit_outcomes.csv."""
    result = SubcommandResult("audit")
    result.outcomes.append(derivative_outcome(config))
    for runner in (run_phase, run_bounds, run_bessel, run_composite):
        sub = runner(config, out)
        result.outcomes.extend(sub.outcomes)
        result.files.extend(sub.files)
    for runner in (run_kernel, run_decay):
        sub = runner(config, out, threads)
        result.outcomes.extend(sub.outcomes)
        result.files.extend(sub.files)
    result.outcomes.append(relation_outcome())

    rows = [(o.name, o.passed, o.measured, o.threshold, o.details) for o in result.outcomes]
    result.files.append(write_csv(out / "audit_outcomes.csv", AUDIT_HEADER, rows))
    failed = [o.name for o in result.outcomes if not o.passed]
    result.message = f"{len(result.outcomes) - len(failed)}/{len(result.outcomes)} audits passed"
    if failed:
        logger.error("Failed audits: %s", ", ".join(failed))
    return result


_RUNNERS = {
    "phase": run_phase,
    "bounds": run_bounds,
    "bessel": run_bessel,
    "composite": run_composite,
}
_THREADED_RUNNERS = {
    "kernel": run_kernel,
    "decay": run_decay,
    "audit": run_audit,
}
SUBCOMMANDS = tuple(sorted({*_RUNNERS, *_THREADED_RUNNERS}))


def run_subcommand(name: str, config: ScenarioConfig, out_dir: Path | None = None, threads: int = 1) -> SubcommandResult:
    """Run one subcommand; out_dir defaults to the config's output_dir."""
    out = Path(out_dir if out_dir is not None else config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    logger.info("Running %s into %s", name, out)
    if name in _RUNNERS:
        result = _RUNNERS[name](config, out)
    elif name in _THREADED_RUNNERS:
        result = _THREADED_RUNNERS[name](config, out, threads)
    else:
        raise KeyError(f"unknown subcommand {name!r}")
    for path in result.files:
        logger.info("Wrote %s", path)
    logger.info("%s finished with status %d", name, result.status)
    return result
