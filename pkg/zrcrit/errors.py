"""Exception hierarchy for zrcrit.

Domain errors subclass ValueError so that callers which only expect invalid input
keep working; resource errors subclass RuntimeError.
"""

from typing import Optional


class ZrcritError(Exception):
    """Base class for all zrcrit errors."""


class NonConvergentError(ZrcritError, ValueError):
    """Partition series diverges (power-law weights with b <= 1 at fugacity 1)."""


class InfiniteVarianceError(ZrcritError, ValueError):
    """Critical variance is infinite (power-law tails with b <= 3)."""


class SupercriticalError(ZrcritError, ValueError):
    """Requested density lies above the critical density."""


class NoRootError(ZrcritError, ValueError):
    """Defining equation has no root in the admissible range."""


class UnsupportedCramerError(ZrcritError, ValueError):
    """Cramér coefficients of order >= 2 were needed but not supplied."""


class ImpossibleNError(ZrcritError, ValueError):
    """P[S_L = N] vanishes at machine scale."""


class UnreachableError(ZrcritError, ValueError):
    """Target mean cannot be reached by any exponential tilt."""


class NonPositiveError(ZrcritError, ValueError):
    """Quantity that must be positive is not."""


class QuadratureError(ZrcritError, RuntimeError):
    """Adaptive quadrature did not converge."""


class InsufficientSamplesError(ZrcritError, ValueError):
    """Too few samples for a goodness-of-fit statistic."""


class BudgetExceededError(ZrcritError, RuntimeError):
    """Computation would exceed its configured resource budget.

    Attributes:
        acceptance_rate: Observed acceptance rate for rejection samplers
        work: Estimated work units for deterministic computations
    """

    def __init__(self, message: str, acceptance_rate: Optional[float] = None, work: Optional[float] = None):
        super().__init__(message)
        self.acceptance_rate = acceptance_rate
        self.work = work


class ValidityWarning(UserWarning):
    """Asymptotic formula evaluated outside its range of validity."""
