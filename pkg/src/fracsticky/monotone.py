"""Right-continuous nondecreasing functions as knot sequences.

A :class:`MonotoneFn` stores knots ``(s_i, v_i)`` with ``s`` nondecreasing
and ``v`` nondecreasing.  Between distinct abscissae the function is linear;
a repeated abscissa encodes a jump, and evaluation is right-continuous (the
last knot at a given ``s`` wins).  This one representation covers all the
clock objects used by the path engine: continuous clocks, pure-jump pieces,
staircases, and their generalized inverses.

The generalized inverse ``f^{-1}(t) = inf{s : f(s) > t}`` of a knot function
is again a knot function: swapping the knot columns exchanges jumps and
plateaus, and right-continuous evaluation of the swapped knots yields exactly
the infimum convention.  Points beyond the last knot evaluate to the
``beyond`` attribute (``+inf`` for inverses, per the empty-set convention).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

__all__ = ["MonotoneFn", "generalized_inverse"]


@dataclass(frozen=True)
class MonotoneFn:
    """Piecewise-linear right-continuous nondecreasing function.

    :param s: knot abscissae, nondecreasing (duplicates encode jumps)
    :param v: knot values, nondecreasing
    :param beyond: value returned for arguments past the last knot;
        ``nan`` means "extend the last knot value" (default)
    """

    s: np.ndarray
    v: np.ndarray
    beyond: float = field(default=float("nan"))

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        v = np.asarray(self.v, dtype=float)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "v", v)
        if s.ndim != 1 or v.ndim != 1 or s.size != v.size or s.size == 0:
            raise InvalidParameterError("knot arrays must be 1-d, equal length, nonempty")
        if np.any(np.diff(s) < 0):
            raise InvalidParameterError("knot abscissae must be nondecreasing")
        if np.any(np.diff(v) < 0):
            raise InvalidParameterError("knot values must be nondecreasing")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        s, v = self.s, self.v
        # side='right' lands after every duplicate abscissa: right-continuity
        idx = np.searchsorted(s, t, side="right") - 1
        out = np.empty_like(t)

        below = idx < 0
        out[below] = v[0]

        above = idx >= s.size - 1
        if np.isnan(self.beyond):
            out[above] = v[-1]
        else:
            # inverse convention: once t reaches sup f the preimage is empty
            out[above] = self.beyond

        mid = ~(below | above)
        i = idx[mid]
        s0, s1 = s[i], s[i + 1]
        v0, v1 = v[i], v[i + 1]
        with np.errstate(invalid="ignore", divide="ignore"):
            frac = np.where(s1 > s0, (t[mid] - s0) / np.where(s1 > s0, s1 - s0, 1.0), 0.0)
        out[mid] = v0 + frac * (v1 - v0)

        return float(out[0]) if scalar else out

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.s[0]), float(self.s[-1])

    @property
    def range(self) -> tuple[float, float]:
        return float(self.v[0]), float(self.v[-1])

    def shift_values(self, offset: float) -> "MonotoneFn":
        return MonotoneFn(self.s, self.v + offset, self.beyond)


def generalized_inverse(f: MonotoneFn) -> MonotoneFn:
    """Return ``f^{-1}(t) = inf{s : f(s) > t}`` as a :class:`MonotoneFn`.

    Jumps of ``f`` become plateaus of the inverse and plateaus become jumps;
    for continuous strictly increasing ``f`` this is the ordinary inverse.
    Arguments at or past ``sup f`` evaluate to ``+inf`` (empty-set sentinel).
    """
    return MonotoneFn(f.v, f.s, beyond=np.inf)
