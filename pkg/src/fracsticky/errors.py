"""Exception hierarchy shared by all fracsticky modules.

Callers can catch :class:`FracStickyError` to intercept anything raised on
purpose by this package while letting genuine bugs (TypeError and friends)
propagate.
"""

from __future__ import annotations


class FracStickyError(Exception):
    """Base class for every error raised deliberately by fracsticky."""


class InvalidParameterError(FracStickyError, ValueError):
    """A domain or consistency precondition on user input failed."""


class ConvergenceError(FracStickyError, RuntimeError):
    """A numerical routine could not meet its requested tolerance.

    The achieved error bound is attached so callers can decide whether the
    partial result is still usable.
    """

    def __init__(self, message: str, achieved_bound: float):
        super().__init__(f"{message} (achieved bound {achieved_bound:.3e})")
        self.achieved_bound = achieved_bound


class MissedEigenvalueError(FracStickyError, RuntimeError):
    """An eigenfunction's oscillation count exposed a skipped root."""


class InversionInstabilityError(FracStickyError, RuntimeError):
    """Order-doubling disagreement in a numerical Laplace inversion.

    Both estimates are attached for inspection.
    """

    def __init__(self, message: str, low_order: float, high_order: float):
        super().__init__(
            f"{message} (order M: {low_order!r}, order 2M: {high_order!r})"
        )
        self.low_order = low_order
        self.high_order = high_order


class SchemeInstabilityError(FracStickyError, RuntimeError):
    """A finite-difference solution grew beyond its initial-datum bound."""


class TailAccuracyWarning(UserWarning):
    """The simulation horizon is too short for the requested tail tolerance."""
