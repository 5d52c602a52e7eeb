"""Random variate generation for the stochastic primitives.

One-sided stable subordinator increments (Kanter construction), heavy-tailed
holding times with Mittag-Leffler survival, inverse-subordinator marginals,
and a counter-based stream type so parallel Monte Carlo runs are reproducible
for any worker layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels.numpy_backend import _stable_standard
from .errors import InvalidParameterError

__all__ = [
    "RngStream",
    "StableParams",
    "SubordinatorTrace",
    "sample_positive_stable",
    "sample_mittag_leffler",
    "sample_inverse_stable_marginal",
    "sample_subordinator_increments",
    "positive_stable_array",
    "ml_holding_array",
    "inverse_stable_array",
]

_U64 = 2**64
_MIX = 0x9E3779B97F4A7C15  # odd multiplier, spreads derived stream ids


@dataclass(eq=True)
class RngStream:
    """Counter-based random stream addressed by (seed, stream_id).

    The same pair always reproduces the same draw sequence; distinct
    stream ids give statistically independent streams.  The underlying
    generator is created lazily and is owned by whoever holds the object.
    """

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= int(v) < _U64:
                raise InvalidParameterError(f"{name} must be an unsigned 64-bit integer, got {v!r}")
        self.seed = int(self.seed)
        self.stream_id = int(self.stream_id)

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            # the key must be a uint64 array: a plain int list with an entry
            # above int64 max would round-trip through float64 and collide
            key = np.array([self.seed, self.stream_id], dtype=np.uint64)
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def substream(self, k: int) -> "RngStream":
        """Derived independent stream; deterministic in (stream_id, k)."""
        if k < 0:
            raise InvalidParameterError("substream index must be nonnegative")
        return RngStream(self.seed, (self.stream_id * _MIX + k + 1) % _U64)


@dataclass(frozen=True)
class StableParams:
    """One-sided stable law with E[exp(-xi * S)] = exp(-scale * xi**alpha)."""

    alpha: float
    scale: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidParameterError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.scale > 0.0:
            raise InvalidParameterError(f"scale must be positive, got {self.scale}")


@dataclass(frozen=True)
class SubordinatorTrace:
    """Subordinator values sampled along an increasing local-time axis."""

    levels: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if levels.ndim != 1 or levels.shape != values.shape:
            raise InvalidParameterError("levels and values must be 1-d arrays of equal length")
        if levels.size and (levels[0] < 0.0 or np.any(np.diff(levels) <= 0.0)):
            raise InvalidParameterError("levels must be strictly increasing and start at >= 0")
        if np.any(np.diff(values) < 0.0):
            raise InvalidParameterError("values must be nondecreasing")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "values", values)


def positive_stable_array(alpha: float, scale, size: int, gen: np.random.Generator) -> np.ndarray:
    """Vector of stable draws; ``scale`` may broadcast against ``size``.

    Consumes two uniform blocks of length ``size`` (angle block first).
    """
    u = gen.random(size)
    e = gen.random(size)
    return np.asarray(scale) ** (1.0 / alpha) * _stable_standard(u, e, alpha, 1.0 / alpha)


def ml_holding_array(alpha: float, rate: float, size: int, gen: np.random.Generator) -> np.ndarray:
    """Vector of holding times with survival E_alpha(-rate * t**alpha).

    Product representation (exponential mixed into the stable scale);
    consumes three uniform blocks of length ``size``.  At alpha = 1 the
    stable factor degenerates to exactly 1 and the draw is Exp(rate).
    """
    mix = -np.log1p(-gen.random(size)) / rate
    return positive_stable_array(alpha, mix, size, gen)


def inverse_stable_array(alpha: float, t, size: int, gen: np.random.Generator) -> np.ndarray:
    """Vector of inverse-subordinator marginals L_t = (t / S)**alpha."""
    u = gen.random(size)
    e = gen.random(size)
    s = _stable_standard(u, e, alpha, 1.0 / alpha)
    return (np.asarray(t) / s) ** alpha


def sample_positive_stable(p: StableParams, rng: RngStream) -> float:
    """One draw S > 0 with E[exp(-xi S)] = exp(-p.scale * xi**p.alpha)."""
    return float(positive_stable_array(p.alpha, p.scale, 1, rng.generator)[0])


def sample_mittag_leffler(alpha: float, rate: float, rng: RngStream) -> float:
    """One holding-time draw T with P(T > t) = E_alpha(-rate * t**alpha)."""
    if not 0.0 < alpha <= 1.0:
        raise InvalidParameterError(f"alpha must lie in (0, 1], got {alpha}")
    if not rate > 0.0:
        raise InvalidParameterError(f"rate must be positive, got {rate}")
    return float(ml_holding_array(alpha, rate, 1, rng.generator)[0])


def sample_inverse_stable_marginal(alpha: float, t: float, rng: RngStream) -> float:
    """One draw of the inverse-subordinator marginal at time t.

    E[exp(-xi L_t)] = E_alpha(-xi * t**alpha).
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidParameterError(f"alpha must lie in (0, 1), got {alpha}")
    if not t > 0.0:
        raise InvalidParameterError(f"t must be positive, got {t}")
    return float(inverse_stable_array(alpha, t, 1, rng.generator)[0])


def sample_subordinator_increments(
    p: StableParams, levels, rng: RngStream
) -> SubordinatorTrace:
    """Sample the subordinator along ``levels`` by independent increments.

    Each increment over a gap d has Laplace transform
    exp(-d * p.scale * xi**p.alpha); values are their running sum, with
    value 0 attached to a leading level 0.
    """
    lv = np.asarray(levels, dtype=float)
    if lv.ndim != 1 or lv.size == 0:
        raise InvalidParameterError("levels must be a nonempty 1-d sequence")
    if lv[0] < 0.0 or np.any(np.diff(lv) <= 0.0):
        raise InvalidParameterError("levels must be strictly increasing and start at >= 0")
    gaps = np.diff(lv, prepend=0.0)
    vals = np.zeros(lv.size)
    pos = gaps > 0.0
    n_pos = int(np.count_nonzero(pos))
    if n_pos:
        vals[pos] = positive_stable_array(p.alpha, gaps[pos] * p.scale, n_pos, rng.generator)
    return SubordinatorTrace(lv, np.cumsum(vals))
