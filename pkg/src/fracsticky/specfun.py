"""Mittag-Leffler function on the negative real axis, plus small kernels.

Everything downstream (holding-time laws, spectral series, Laplace pairs)
funnels through ``E_alpha`` evaluated at nonpositive arguments, so this module
favors verifiable accuracy over generality: power series near the origin with
an explicit float64 cancellation estimate, escalation to multi-precision when
that estimate exceeds the requested tolerance, and the completely-monotone
spectral integral for large arguments.

Public API:
    MLEvalConfig        evaluation policy (series cutoff/radius, quadrature)
    mittag_leffler      E_alpha(z) for alpha in (0,1], z <= 0
    ml_survival         E_alpha(-rate * t^alpha)
    gauss_kernel        exp(-z^2/4t)/sqrt(4 pi t)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from scipy.integrate import quad
from scipy.special import gammaln

from .errors import ConvergenceError, InvalidParameterError

__all__ = ["MLEvalConfig", "mittag_leffler", "ml_survival", "gauss_kernel"]

_EPS = 2.220446049250313e-16
# safety factor on the cancellation estimate: term-level gamma evaluations
# carry a few ulp of relative error each, observed up to ~50x maxterm*eps
_CANCEL_MARGIN = 50.0


@dataclass(frozen=True)
class MLEvalConfig:
    """Evaluation policy for the Mittag-Leffler function.

    :param series_cutoff: maximum number of power-series terms
    :param series_radius: |z| threshold below which the series is attempted
    :param quad_nodes: subinterval budget for the integral representation
    :param abs_tol: absolute error target for a single evaluation
    """

    series_cutoff: int = 300
    series_radius: float = 5.0
    quad_nodes: int = 200
    abs_tol: float = 1e-10

    def __post_init__(self):
        if self.series_cutoff <= 0:
            raise InvalidParameterError("series_cutoff must be a positive integer")
        if not self.series_radius > 0:
            raise InvalidParameterError("series_radius must be positive")
        if self.quad_nodes < 8:
            raise InvalidParameterError("quad_nodes must be at least 8")
        if not self.abs_tol > 0:
            raise InvalidParameterError("abs_tol must be positive")


_DEFAULT_CFG = MLEvalConfig()


def _series_float(alpha: float, z: float, cutoff: int) -> tuple[float, float, bool]:
    """Float64 power series with a running cancellation/truncation estimate.

    Returns (value, error_estimate, converged); ``converged`` is False when
    the terms had not decayed to negligible size by ``cutoff``, in which case
    no series evaluation with this term budget can work (small alpha pushes
    the term peak to k ~ |z|**(1/alpha) / alpha, far past any fixed cutoff).
    """
    total = 1.0
    term_mag = 1.0
    max_mag = 1.0
    converged = False
    k = 1
    while k < cutoff:
        log_mag = k * math.log(abs(z)) - gammaln(alpha * k + 1.0)
        term_mag = math.exp(log_mag)
        term = term_mag if (k % 2 == 0 or z > 0) else -term_mag
        total += term
        max_mag = max(max_mag, term_mag)
        # once terms decay they do so monotonically; stop when negligible
        if term_mag < 1e-18 * max(1.0, abs(total)) and k * alpha > abs(z):
            converged = True
            break
        k += 1
    cancellation = max_mag * _EPS * _CANCEL_MARGIN
    truncation = term_mag
    return total, cancellation + truncation, converged


def _series_mp(alpha: float, z: float, cutoff: int) -> float:
    """Multi-precision series; digits sized to the largest term magnitude."""
    # crude bound on log10(max term) from the float64 scan
    peak = 0.0
    for k in range(1, cutoff):
        peak = max(peak, k * math.log10(abs(z)) - gammaln(alpha * k + 1.0) / math.log(10))
    with mpmath.workdps(int(peak) + 30):
        a = mpmath.mpf(alpha)
        zz = mpmath.mpf(z)
        total = mpmath.mpf(1)
        for k in range(1, cutoff):
            term = zz**k / mpmath.gamma(a * k + 1)
            total += term
            if abs(term) < mpmath.mpf(10) ** (-(int(peak) + 25)) and k * alpha > abs(z):
                break
        return float(total)


def _spectral_integral(alpha: float, x: float, cfg: MLEvalConfig) -> float:
    """E_alpha(-x) for x > 0 via the completely-monotone representation.

    E_alpha(-x) = sin(alpha pi)/(alpha pi) *
                  int_0^inf exp(-(x u)^(1/alpha)) / (u^2 + 2 u cos(alpha pi) + 1) du
    (substituted form of the classical spectral density; smooth integrand,
    no endpoint singularity).
    """
    cospa = math.cos(alpha * math.pi)
    sinpa = math.sin(alpha * math.pi)
    inv_alpha = 1.0 / alpha
    decay = x**inv_alpha

    def integrand(u: float) -> float:
        return math.exp(-decay * u**inv_alpha) / (u * u + 2.0 * cospa * u + 1.0)

    pre = sinpa / (alpha * math.pi)
    # integrand mass sits near u ~ 1/x; split there to help the adaptive
    # rule when x is very large
    u_star = min(max(1.0 / x, 1e-12), 1e12)
    tol = cfg.abs_tol / (10.0 * pre)
    val1, err1 = quad(integrand, 0.0, u_star, epsabs=tol, epsrel=1e-13, limit=cfg.quad_nodes)
    val2, err2 = quad(integrand, u_star, math.inf, epsabs=tol, epsrel=1e-13, limit=cfg.quad_nodes)
    est = pre * (val1 + val2)
    err = pre * (err1 + err2)
    if err > cfg.abs_tol:
        raise ConvergenceError("Mittag-Leffler integral did not meet abs_tol", err)
    return est


def _spectral_integral_mp(alpha: float, x: float) -> float:
    """mpmath fallback for alpha close to 1 where the pole pinches u = 1."""
    with mpmath.workdps(30):
        a = mpmath.mpf(alpha)
        xx = mpmath.mpf(x)
        cospa = mpmath.cos(a * mpmath.pi)
        sinpa = mpmath.sin(a * mpmath.pi)

        def f(u):
            return mpmath.exp(-((xx * u) ** (1 / a))) / (u * u + 2 * cospa * u + 1)

        val = mpmath.quad(f, [0, 1 / xx, 1, mpmath.inf])
        return float(sinpa / (a * mpmath.pi) * val)


def mittag_leffler(alpha: float, z: float, cfg: MLEvalConfig = _DEFAULT_CFG) -> float:
    """Evaluate E_alpha(z) for alpha in (0, 1] and z <= 0.

    The result lies in (0, 1], decreases in |z|, and meets ``cfg.abs_tol``
    absolutely (a :class:`ConvergenceError` carrying the achieved bound is
    raised otherwise).
    """
    if not 0.0 < alpha <= 1.0:
        raise InvalidParameterError(f"alpha must lie in (0, 1], got {alpha}")
    if z > 0.0:
        raise InvalidParameterError(f"z must be nonpositive, got {z}")
    if z == 0.0:
        return 1.0
    if alpha == 1.0:
        return math.exp(z)

    x = -z
    if x <= cfg.series_radius:
        value, err, converged = _series_float(alpha, z, cfg.series_cutoff)
        if converged:
            if err <= cfg.abs_tol:
                return value
            # digits lost to cancellation only; same term count in
            # multi-precision recovers them
            return _series_mp(alpha, z, cfg.series_cutoff)
        # term peak beyond the cutoff: no series is viable, fall through
    if alpha >= 0.95:
        # spectral density degenerates towards a pole at u = 1 as alpha -> 1
        return _spectral_integral_mp(alpha, x)
    return _spectral_integral(alpha, x, cfg)


def ml_survival(alpha: float, rate: float, t: float, cfg: MLEvalConfig = _DEFAULT_CFG) -> float:
    """Survival function E_alpha(-rate * t^alpha) of the fractional holding law.

    Equals exp(-rate*t) at alpha=1; value in (0, 1] for every t >= 0.
    """
    if not rate > 0.0:
        raise InvalidParameterError(f"rate must be positive, got {rate}")
    if t < 0.0:
        raise InvalidParameterError(f"t must be nonnegative, got {t}")
    if t == 0.0:
        return 1.0
    return mittag_leffler(alpha, -rate * t**alpha, cfg)


def gauss_kernel(t: float, z: float) -> float:
    """Heat kernel exp(-z^2/4t)/sqrt(4 pi t) of the generator d^2/dx^2."""
    if not t > 0.0:
        raise InvalidParameterError(f"t must be positive, got {t}")
    return math.exp(-z * z / (4.0 * t)) / math.sqrt(4.0 * math.pi * t)
