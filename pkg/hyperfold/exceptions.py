"""
Error hierarchy shared by every hyperfold service.

Services raise these; the CLI maps ConfigError to exit status 1 and failed
audits to exit status 2.
"""


class HyperfoldError(Exception):
    """Base class for all hyperfold errors."""


class DomainError(HyperfoldError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PreconditionError(HyperfoldError):
    """A documented precondition failed. Every violated bound is named."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "precondition failed")


class QuadratureError(HyperfoldError):
    """A quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, achieved: float, requested: float):
        self.achieved = achieved
        self.requested = requested
        super().__init__(f"{message} (achieved {achieved:.3e}, requested {requested:.3e})")


class ConvergenceError(HyperfoldError):
    """An iterative eigen/singular value solver did not converge."""

    def __init__(self, message: str, previous: float, last: float):
        self.previous = previous
        self.last = last
        super().__init__(f"{message} (last iterates {previous!r}, {last!r})")


class UnderResolvedError(HyperfoldError, ValueError):
    """Sampling does not resolve the oscillation of the phase."""

    def __init__(self, required: int, given: int):
        self.required = required
        self.given = given
        super().__init__(f"under-resolved sampling: {given} nodes given, {required} required")


class ConfigError(HyperfoldError):
    """Scenario configuration failed validation. Carries every violation."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration: " + "; ".join(self.errors))
