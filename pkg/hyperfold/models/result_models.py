"""
Result records returned by the hyperfold services.

Audit and fit results are pydantic models so they serialise directly into
the JSON products of the CLI; numeric evaluations that carry complex values
are plain dataclasses.
"""

import math
from dataclasses import dataclass
from enum import Enum

from pydantic import BaseModel, Field


class BesselRegime(str, Enum):
    SERIES = "Series"
    ASYMPTOTIC = "Asymptotic"


class BesselEval(BaseModel):
    """Value of J1 together with the regime used and an absolute error estimate."""

    value: float
    regime: BesselRegime
    est_error: float = Field(ge=0.0)


@dataclass(frozen=True)
class KernelEvaluation:
    """Smoothed kernel K_alpha at geodesic distance r, split into its three contributions."""

    delta_prime_term: complex
    delta_term: complex
    tail_term: complex
    r: float
    lam: float
    T: float
    tail_nodes: int = 0

    @property
    def total(self) -> complex:
        return self.delta_prime_term + self.delta_term + self.tail_term

    @property
    def bound_ratio(self) -> float:
        """|K| T e^{r/2} / lambda."""
        return abs(self.total) * self.T * math.exp(0.5 * self.r) / self.lam


class AdmissibilityReport(BaseModel):
    """Range of phi on [0,1] x I and the four consequences of phi <= T."""

    phi_min: float
    phi_max: float
    T: float
    bounds_ok: dict[str, bool]
    admissible: bool
    refined_phi_min: float | None = None

    def violations(self) -> list[str]:
        out = []
        if self.phi_min < 2.0:
            out.append(f"phi_min={self.phi_min:.6g} < 2")
        if self.phi_max > self.T:
            out.append(f"phi_max={self.phi_max:.6g} > T={self.T:g}")
        out.extend(f"bound {name} violated" for name, ok in self.bounds_ok.items() if not ok)
        return out


class RegionMinimum(BaseModel):
    """Minimum of a lower-bound quantity over one region of the decomposition."""

    region: str
    quantity: str
    minimum: float | None = None
    points: int = 0
    labelled: int = Field(default=0, description="Grid points classified into the region")
    implied_C: float | None = None

    @property
    def covered(self) -> bool:
        """False when the region holds grid points but none of them entered the minimum."""
        return self.labelled == 0 or self.points > 0


class Lemma1Audit(BaseModel):
    T: float
    eps: float
    grid_n: int
    regions: list[RegionMinimum]
    proof_case: str
    zero_set_empty: bool

    def region(self, name: str) -> RegionMinimum:
        for entry in self.regions:
            if entry.region == name:
                return entry
        raise KeyError(name)


class DerivativeSup(BaseModel):
    alpha: tuple[int, int]
    sup: float
    implied_C: float


class Lemma2Audit(BaseModel):
    T: float
    max_order: int
    grid_n: int
    sups: list[DerivativeSup]
    closed_form_phi_st_sup: float
    numerator_sup: float
    denominator_inf: float

    def sup_for(self, alpha: tuple[int, int]) -> DerivativeSup:
        for entry in self.sups:
            if entry.alpha == tuple(alpha):
                return entry
        raise KeyError(alpha)


class DecayFitResult(BaseModel):
    lambda_grid: list[float]
    norms: list[float]
    sigma: float
    r_squared: float = Field(ge=0.0, le=1.0)


class PieceEstimate(BaseModel):
    region: str
    norm: float
    reference: float
    implied_C: float | None = None


class CompositeAudit(BaseModel):
    lam: float
    T: float
    eps: float
    pieces: list[PieceEstimate]
    total: float
    reference_total: float
    implied_C: float | None
    partition_error: float

    def piece(self, name: str) -> PieceEstimate:
        for entry in self.pieces:
            if entry.region == name:
                return entry
        raise KeyError(name)


class AuditOutcome(BaseModel):
    """One pass/fail line of the acceptance audit."""

    name: str
    passed: bool
    measured: float
    threshold: float
    details: str = ""

    @classmethod
    def at_most(cls, name: str, measured: float, threshold: float, details: str = "") -> "AuditOutcome":
        ok = math.isfinite(measured) and measured <= threshold
        return cls(name=name, passed=ok, measured=measured, threshold=threshold, details=details)

    @classmethod
    def within(cls, name: str, measured: float, lo: float, hi: float, details: str = "") -> "AuditOutcome":
        ok = math.isfinite(measured) and lo <= measured <= hi
        detail = f"range [{lo:g}, {hi:g}]" + (f"; {details}" if details else "")
        return cls(name=name, passed=ok, measured=measured, threshold=hi, details=detail)


class ShellMaximum(BaseModel):
    """max |K_alpha| over the dyadic shell 2^k <= r <= 2^{k+1}."""

    k: int
    r_lo: float
    r_hi: float
    max_abs: float


class TubeSumAudit(BaseModel):
    lam: float
    T: float
    shells: list[ShellMaximum]
    total: float
    reference: float
    implied_C: float


class KernelSweep(BaseModel):
    """
    Bound ratios |K| T e^{r/2} / lambda over an (r, lambda, T) grid.

    sups holds the per-(lambda, T) supremum over r in [1, T - 1], T_sups the
    per-T supremum over r and lambda; stability is the spread of T_sups.
    """

    rows: list[dict]
    sups: dict[str, float]
    T_sups: dict[str, float]
    implied_C: float
    stability: float
    median_excess: float
    stable: bool


class BoundConstants(BaseModel):
    """
    The bracketed constants of the oscillatory-integral bounds with the
    universal factor set to 1. Infinite when the relevant infimum vanishes.
    """

    C: float
    C_prime: float
    C_double_prime: float
    diam: float
    a_sup: float
    t_sum: float
    s_sum: float
    inf_phi_st: float
    inf_fold_t: float | None = None
    inf_fold_s: float | None = None


class ParameterLawAudit(BaseModel):
    """Bound assembly with T = c log(lambda) and eps = e^{-CT} / T."""

    C: float
    c: float
    rows: list[dict]
    spread: float
    passed: bool
