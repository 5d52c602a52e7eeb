"""Monte Carlo accumulators and Kolmogorov-Smirnov statistics.

All goodness-of-fit gates in the test and acceptance suites run at the
fixed significance level 0.01 with asymptotic thresholds; sample sizes
are large enough (>= 1e4) that small-sample corrections are immaterial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

__all__ = ["McAccumulator", "ks_one_sample", "ks_two_sample", "empirical_laplace"]

# sqrt(-ln(0.005)/2): asymptotic KS critical coefficient at level 0.01
KS_COEFF_001 = 1.6276236115189504


@dataclass
class McAccumulator:
    """Streaming mean/variance state forming a commutative merge monoid.

    ``m2`` is the sum of squared deviations from the running mean, so the
    standard error is sqrt(m2 / (n * (n - 1))).
    """

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def from_samples(cls, samples) -> "McAccumulator":
        x = np.asarray(samples, dtype=float).ravel()
        if x.size == 0:
            return cls()
        if np.any(np.isnan(x)):
            raise InvalidParameterError("samples contain NaN")
        mean = float(np.mean(x))
        m2 = float(np.sum((x - mean) ** 2))
        return cls(int(x.size), mean, m2)

    def add(self, x: float) -> None:
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)

    def merge(self, other: "McAccumulator") -> "McAccumulator":
        if other.n == 0:
            return McAccumulator(self.n, self.mean, self.m2)
        if self.n == 0:
            return McAccumulator(other.n, other.mean, other.m2)
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.n / n)
        m2 = self.m2 + other.m2 + delta * delta * (self.n / n * other.n)
        return McAccumulator(n, mean, m2)

    @property
    def se(self) -> float:
        if self.n < 2:
            return math.inf
        return math.sqrt(self.m2 / (self.n * (self.n - 1)))

    @property
    def variance(self) -> float:
        if self.n < 2:
            return math.inf
        return self.m2 / (self.n - 1)


def _clean_sorted(samples, minimum: int) -> np.ndarray:
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < minimum:
        raise InvalidParameterError(f"need at least {minimum} samples, got {x.size}")
    if np.any(np.isnan(x)):
        raise InvalidParameterError("samples contain NaN")
    return np.sort(x)


def ks_one_sample(samples, cdf) -> tuple[float, float]:
    """Supremum distance between the empirical CDF and ``cdf``.

    :returns: (D, threshold); the null is rejected at level 0.01 when
        D exceeds the threshold 1.628/sqrt(n).
    """
    x = _clean_sorted(samples, 100)
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    if np.any(np.isnan(f)) or np.any(f < -1e-12) or np.any(f > 1.0 + 1e-12):
        raise InvalidParameterError("cdf must map samples into [0, 1]")
    grid = np.arange(1, n + 1) / n
    d_plus = float(np.max(grid - f))
    d_minus = float(np.max(f - (grid - 1.0 / n)))
    return max(d_plus, d_minus), KS_COEFF_001 / math.sqrt(n)


def ks_two_sample(a, b) -> tuple[float, float]:
    """Supremum distance between two empirical CDFs.

    :returns: (D, threshold) with threshold 1.628*sqrt((n+m)/(n*m)) at
        level 0.01.
    """
    xa = _clean_sorted(a, 100)
    xb = _clean_sorted(b, 100)
    n, m = xa.size, xb.size
    pooled = np.concatenate([xa, xb])
    order = np.argsort(pooled, kind="mergesort")
    # +1/n for each a-point, -1/m for each b-point; |running sum| peaks at D,
    # read only where the pooled value changes so ties are processed atomically
    steps = np.where(order < n, 1.0 / n, -1.0 / m)
    gap = np.cumsum(steps)
    sorted_pool = pooled[order]
    closed = np.append(sorted_pool[1:] != sorted_pool[:-1], True)
    # cumulative rounding can push the sup a few ulp past the exact bound 1
    d = min(float(np.max(np.abs(gap[closed]))), 1.0)
    return d, KS_COEFF_001 * math.sqrt((n + m) / (n * m))


def empirical_laplace(samples) -> McAccumulator:
    """Accumulate already-transformed path-functional samples.

    The caller applies the Laplace weight (for instance exp(-xi * value))
    before calling; this just builds the mergeable mean/SE state.
    """
    return McAccumulator.from_samples(samples)
