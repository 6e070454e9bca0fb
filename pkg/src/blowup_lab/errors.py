"""Exception hierarchy shared across the lab."""

from __future__ import annotations


class BlowupLabError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BlowupLabError, ValueError):
    """Argument outside the mathematical domain of a function."""


class AccuracyError(BlowupLabError, ArithmeticError):
    """A numerical routine could not reach its requested accuracy."""


class HypothesisViolation(BlowupLabError, ValueError):
    """System parameters violate the scalar hypotheses (p, q > 1, m >= 0, delta_i >= 0, ...).

    ``failures`` lists one human readable entry per violated invariant.
    """

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))


class OutsideTheoremError(BlowupLabError, ValueError):
    """Raised when a lifespan bound is requested outside the blow-up region."""


class UnsupportedDimension(BlowupLabError, ValueError):
    pass


class ParameterMismatch(BlowupLabError, ValueError):
    pass


class FitError(BlowupLabError, ValueError):
    """Least-squares fit rejected (degenerate abscissa, non-positive data, ...)."""


class IntegratorFault(BlowupLabError, RuntimeError):
    """The ODE integrator produced a state that the dynamics forbid."""
