"""Sticky and elastic reflected diffusions with fractional boundary clocks.

Simulation of reflected Brownian paths time-changed through boundary
local time, holding-time and lifetime laws, and the two associated
boundary-value solvers (half-line Laplace/Volterra/L1 routes and the
interval spectral route), with a command-line front end.
"""

from .errors import (
    ConvergenceError,
    FracStickyError,
    InvalidParameterError,
    InversionInstabilityError,
    MissedEigenvalueError,
    SchemeInstabilityError,
    TailAccuracyWarning,
)
from .model import ModelParams
from .monotone import MonotoneFn, generalized_inverse
from .specfun import MLEvalConfig, gauss_kernel, mittag_leffler, ml_survival

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "FracStickyError",
    "InvalidParameterError",
    "InversionInstabilityError",
    "MissedEigenvalueError",
    "ModelParams",
    "MonotoneFn",
    "MLEvalConfig",
    "SchemeInstabilityError",
    "TailAccuracyWarning",
    "__version__",
    "gauss_kernel",
    "generalized_inverse",
    "mittag_leffler",
    "ml_survival",
]
