"""Path-level engine for reflected, sticky, and time-changed motions.

The primitive object is a reflected Brownian path on the half line with its
boundary local time (generator d^2/dx^2, so increments carry variance 2*dt
and the boundary-time normalization satisfies the Laplace identity
E_0[int exp(-lam*t) dgamma] = 1/sqrt(lam)).  On top of it sit the monotone
clocks: the sticky clock t + (eta/sigma)*gamma, its fractional version with
a stable subordinator riding the local-time axis, composed (time-changed)
paths with elastic killing, the event-driven boundary-excursion process,
holding-time extraction, and Laplace-weighted path functionals.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._kernels import reflect_window
from ._kernels.numpy_backend import _stable_standard
from .errors import ConvergenceError, InvalidParameterError, TailAccuracyWarning
from .model import ModelParams
from .monotone import MonotoneFn, generalized_inverse
from .variates import (
    RngStream,
    StableParams,
    SubordinatorTrace,
    positive_stable_array,
    sample_subordinator_increments,
)

__all__ = [
    "PathSkeleton",
    "HoldingRecord",
    "MonotoneFn",
    "generalized_inverse",
    "simulate_rbm",
    "build_sticky_clock",
    "build_frac_sticky_clock",
    "compose_xbar",
    "hat_event_engine",
    "extract_holdings",
    "path_functional_dt",
    "path_functional_dgamma",
    "sample_lifetime",
    "sample_lifetime_batch",
    "excursion_rate",
]

_WINDOW = 8192


@dataclass
class PathSkeleton:
    """Discrete path with its boundary clock.

    ``times`` is the (strictly increasing) sampling grid of whichever clock
    the path lives on, ``positions`` the nonnegative state, ``local_time``
    the nondecreasing boundary clock started at 0 (the reflection local
    time for raw paths, the boundary occupation time for composed ones).
    ``killed_at`` is the elastic lifetime when a kill was applied; the
    arrays then stop at that moment.
    """

    times: np.ndarray
    positions: np.ndarray
    local_time: np.ndarray
    killed_at: float | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        x = np.asarray(self.positions, dtype=float)
        g = np.asarray(self.local_time, dtype=float)
        if not (t.ndim == 1 and t.shape == x.shape == g.shape and t.size > 0):
            raise InvalidParameterError("times, positions, local_time must be equal-length 1-d arrays")
        if t.size > 1 and np.any(np.diff(t) <= 0.0):
            raise InvalidParameterError("times must be strictly increasing")
        if np.any(x < 0.0):
            raise InvalidParameterError("positions must be nonnegative")
        if g[0] != 0.0 or np.any(np.diff(g) < 0.0):
            raise InvalidParameterError("local_time must be nondecreasing and start at 0")
        self.times, self.positions, self.local_time = t, x, g

    @property
    def occupation(self) -> np.ndarray:
        """Elapsed-clock functional; on the discrete grid it is the grid itself."""
        return self.times


@dataclass(frozen=True)
class HoldingRecord:
    """One maximal boundary-holding interval."""

    start: float
    duration: float
    index: int

    def __post_init__(self):
        if not self.duration > 0.0:
            raise InvalidParameterError("holding duration must be positive")


def simulate_rbm(x0: float, horizon: float, dt: float, rng: RngStream) -> PathSkeleton:
    """Reflected Brownian path on [0, horizon] with bridge-corrected local time.

    Per step the within-step minimum of the free motion is drawn from the
    Brownian-bridge law, so boundary crossings between grid points are not
    missed and the local time has no O(sqrt(dt)) deficit.  Draw layout per
    window: one block of standard normals, one block of uniforms.
    """
    if x0 < 0.0:
        raise InvalidParameterError(f"x0 must be nonnegative, got {x0}")
    if not dt > 0.0 or not horizon > 0.0 or dt > horizon:
        raise InvalidParameterError("need 0 < dt <= horizon")
    n_steps = max(1, int(round(horizon / dt)))
    gen = rng.generator
    scale = math.sqrt(2.0 * dt)
    x = np.empty(n_steps + 1)
    l = np.empty(n_steps + 1)
    x[0] = x0
    l[0] = 0.0
    cur_x = np.array([x0])
    cur_l = np.array([0.0])
    for start in range(0, n_steps, _WINDOW):
        w = min(_WINDOW, n_steps - start)
        inc = gen.standard_normal((1, w)) * scale
        log_u = np.log1p(-gen.random((1, w)))
        xs, ls = reflect_window(cur_x, cur_l, inc, log_u, dt)
        x[start + 1 : start + 1 + w] = xs[0]
        l[start + 1 : start + 1 + w] = ls[0]
        cur_x = xs[:, -1].copy()
        cur_l = ls[:, -1].copy()
    times = np.arange(n_steps + 1) * dt
    return PathSkeleton(times, x, l)


def build_sticky_clock(p: ModelParams, sk: PathSkeleton) -> MonotoneFn:
    """Clock V(s) = s + (eta/sigma) * local_time(s): continuous, strictly increasing."""
    return MonotoneFn(sk.times, sk.times + p.stickiness * sk.local_time)


def build_frac_sticky_clock(
    p: ModelParams, sk: PathSkeleton, rng: RngStream
) -> tuple[MonotoneFn, SubordinatorTrace]:
    """Clock V(s) = s + H((eta/sigma) * local_time(s)) with H alpha-stable.

    H is sampled by independent increments along the strictly increasing
    values of the scaled local time; between increase points the clock
    grows at unit slope.  At alpha = 1 this is build_sticky_clock with the
    identity trace (no draws consumed).  A path that never touches the
    boundary yields the identity clock and an empty trace.
    """
    gamma = p.stickiness * sk.local_time
    rises = np.nonzero(np.diff(gamma) > 0.0)[0] + 1
    if rises.size == 0:
        return MonotoneFn(sk.times, sk.times.copy()), SubordinatorTrace(np.zeros(0), np.zeros(0))
    levels = gamma[rises]
    if p.alpha == 1.0:
        jumps = np.concatenate([[0.0], levels])
        trace = SubordinatorTrace(np.concatenate([[0.0], levels]), jumps)
        return build_sticky_clock(p, sk), trace
    raw = sample_subordinator_increments(StableParams(p.alpha, 1.0), levels, rng)
    lv = np.concatenate([[0.0], raw.levels])
    hv = np.concatenate([[0.0], raw.values])
    idx = np.searchsorted(lv, gamma, side="right") - 1
    clock = MonotoneFn(sk.times, sk.times + hv[idx])
    return clock, SubordinatorTrace(lv, hv)


def compose_xbar(
    p: ModelParams, sk: PathSkeleton, clock: MonotoneFn, rng: RngStream, t_max: float | None = None
) -> PathSkeleton:
    """Time-changed path X(clock^{-1}(t)) on an external grid, with elastic kill.

    The external grid reuses the skeleton's spacing and covers
    [0, clock(end)], truncated at ``t_max`` when given (clock jumps are
    heavy tailed, so an uncapped grid can be arbitrarily long).  local_time
    of the result is the level clock (eta/sigma) * gamma(clock^{-1}(t)),
    the quantity driving the elastic kill; at alpha = 1 it is also the
    boundary occupation time (for alpha < 1 the occupation time is the
    subordinator evaluated at this level, see hat_event_engine).  When
    c > 0 one standard exponential is drawn and the path is cut at the
    first external time with (c/sigma) * gamma(clock^{-1}(t)) at or above
    it.
    """
    if clock.s.shape != sk.times.shape or not np.array_equal(clock.s, sk.times):
        raise InvalidParameterError("clock was not built on this skeleton's grid")
    if t_max is not None and not t_max > 0.0:
        raise InvalidParameterError("t_max must be positive when given")
    step = sk.times[1] - sk.times[0] if sk.times.size > 1 else 1.0
    t_end = float(clock.v[-1])
    if t_max is not None:
        t_end = min(t_end, t_max)
    t_ext = np.arange(int(t_end / step) + 1) * step
    tau = generalized_inverse(clock)(t_ext)
    xbar = np.interp(tau, sk.times, sk.positions)
    gbar = p.stickiness * np.interp(tau, sk.times, sk.local_time)
    killed_at = None
    if p.c > 0.0:
        e = -math.log1p(-rng.generator.random())
        # (c/sigma) * gamma(tau) = (c/eta) * gbar
        hit = np.nonzero((p.c / p.eta) * gbar >= e)[0]
        if hit.size:
            k = int(hit[0])
            t_ext, xbar, gbar = t_ext[: k + 1], xbar[: k + 1], gbar[: k + 1]
            killed_at = float(t_ext[k])
    return PathSkeleton(t_ext, xbar, gbar, killed_at=killed_at)


def excursion_rate(p: ModelParams, delta: float) -> float:
    """Boundary-leaving rate paired with the excursion cutoff delta.

    Excursions of duration >= delta leave the boundary at rate
    1/sqrt(pi*delta) per unit of reflection local time, hence
    (sigma/eta)/sqrt(pi*delta) per unit of boundary occupation time; at
    delta = 1/pi the rate is exactly sigma/eta.  Keeping the pair coupled
    makes the occupation-functional law independent of delta up to
    O(sqrt(delta)).
    """
    if not delta > 0.0:
        raise InvalidParameterError(f"delta must be positive, got {delta}")
    return (p.sigma / p.eta) / math.sqrt(math.pi * delta)


def hat_event_engine(
    p: ModelParams, x0: float, horizon: float, delta: float, rng: RngStream
) -> tuple[list[HoldingRecord], MonotoneFn]:
    """Event-driven construction of the subordinated boundary-excursion process.

    Starting from the boundary (after a first-passage leg when x0 > 0), the
    process alternates exponential holds at ``excursion_rate(p, delta)`` and
    interior excursions with duration law delta/U^2, all run through an
    independent alpha-stable subordinator.  Returns the completed holding
    records (start and duration on the subordinated clock) and the boundary
    occupation clock as a piecewise-linear MonotoneFn on [0, horizon].
    When c > 0 an exponential budget at rate c/eta on the level clock (the
    pre-subordination hold time) kills the path, possibly inside a hold;
    only the surviving part of a cut hold is stretched, and the cut hold
    is not recorded.

    Draw layout: one uniform for the kill budget when c > 0; for x0 > 0 one
    standard normal and two uniforms for the passage leg; then six uniforms
    per cycle (hold, stable pair, excursion length, stable pair).
    """
    if x0 < 0.0:
        raise InvalidParameterError(f"x0 must be nonnegative, got {x0}")
    if not 0.0 < delta < horizon:
        raise InvalidParameterError("need 0 < delta < horizon")
    gen = rng.generator
    rate = excursion_rate(p, delta)
    inv_alpha = 1.0 / p.alpha
    budget = math.inf
    if p.c > 0.0:
        budget = -math.log1p(-gen.random()) / (p.c / p.eta)
    u = 0.0
    knots_s = [0.0]
    knots_v = [0.0]
    if x0 > 0.0:
        z = gen.standard_normal()
        passage = x0 * x0 / (2.0 * z * z)
        su, se = gen.random(2)
        u = passage**inv_alpha * float(_stable_standard(su, se, p.alpha, inv_alpha))
        if u >= horizon:
            return [], MonotoneFn(np.array([0.0, horizon]), np.array([0.0, 0.0]))
        knots_s.append(u)
        knots_v.append(0.0)
    records: list[HoldingRecord] = []
    occupied = 0.0
    while u < horizon:
        d = gen.random(6)
        hold = -math.log1p(-d[0]) / rate
        cut = hold >= budget
        h_eff = min(hold, budget)
        budget -= h_eff
        s_hold = float(_stable_standard(d[1], d[2], p.alpha, inv_alpha))
        # stretch only the level time actually spent (independent
        # increments make this exact in law, no bridge needed)
        stay = h_eff**inv_alpha * s_hold
        end = min(u + stay, horizon)
        if end > u:
            if knots_s[-1] < u:
                knots_s.append(u)
                knots_v.append(occupied)
            occupied += end - u
            knots_s.append(end)
            knots_v.append(occupied)
        if not cut and u + stay < horizon:
            records.append(HoldingRecord(u, stay, len(records)))
        u += stay
        if cut or u >= horizon:
            break
        exc = delta / (1.0 - d[3]) ** 2
        s_exc = float(_stable_standard(d[4], d[5], p.alpha, inv_alpha))
        u += exc**inv_alpha * s_exc
    if knots_s[-1] < horizon:
        knots_s.append(horizon)
        knots_v.append(occupied)
    return records, MonotoneFn(np.asarray(knots_s), np.asarray(knots_v))


def extract_holdings(xbar: PathSkeleton, eps_hold: float) -> list[HoldingRecord]:
    """Maximal grid intervals on which the position stays below eps_hold.

    The duration of a run is measured to the first grid point back outside
    the band (or to the end of the grid for a run still open there); the
    first record of a path started on the boundary estimates its initial
    holding time.
    """
    if not eps_hold > 0.0:
        raise InvalidParameterError(f"eps_hold must be positive, got {eps_hold}")
    below = xbar.positions < eps_hold
    if not below.any():
        return []
    edges = np.diff(below.astype(np.int8))
    starts = np.nonzero(edges == 1)[0] + 1
    stops = np.nonzero(edges == -1)[0] + 1
    if below[0]:
        starts = np.concatenate([[0], starts])
    if below[-1]:
        stops = np.concatenate([stops, [xbar.times.size - 1]])
    records = []
    for a, b in zip(starts, stops):
        if b > a:
            records.append(
                HoldingRecord(float(xbar.times[a]), float(xbar.times[b] - xbar.times[a]), len(records))
            )
    return records


def _check_tail(bound: float, tail_tol: float | None, killed: bool) -> None:
    if tail_tol is not None and not killed and bound > tail_tol:
        warnings.warn(
            f"truncation tail bound {bound:.3e} exceeds requested tolerance {tail_tol:.3e}",
            TailAccuracyWarning,
            stacklevel=3,
        )


def path_functional_dt(
    sk: PathSkeleton, lam: float, a: float = 0.0, b: float = 0.0, tail_tol: float | None = None
) -> float:
    """Trapezoidal value of int exp(-lam*t - a*position - b*local_time) dt.

    Truncation at the final grid time leaves at most exp(-lam*T)/lam
    behind; when ``tail_tol`` is given, exceeding it raises a
    TailAccuracyWarning (suppressed for killed paths, whose integral is
    complete).
    """
    if not lam > 0.0 or a < 0.0 or b < 0.0:
        raise InvalidParameterError("need lam > 0 and a, b >= 0")
    w = np.exp(-lam * sk.times - a * sk.positions - b * sk.local_time)
    _check_tail(math.exp(-lam * sk.times[-1]) / lam, tail_tol, sk.killed_at is not None)
    return float(np.trapezoid(w, sk.times))


def path_functional_dgamma(
    sk: PathSkeleton, lam: float, b: float = 0.0, tail_tol: float | None = None
) -> float:
    """Stieltjes value of int exp(-lam*t - b*local_time) dlocal_time.

    Within a step the local-time factor is integrated exactly and the time
    factor is taken at the midpoint.  The truncation tail is bounded by
    exp(-lam*T)/sqrt(lam) (worst case over restart states).
    """
    if not lam > 0.0 or b < 0.0:
        raise InvalidParameterError("need lam > 0 and b >= 0")
    g = sk.local_time
    dg = np.diff(g)
    mid = np.exp(-lam * 0.5 * (sk.times[1:] + sk.times[:-1]))
    if b == 0.0:
        val = float(np.sum(mid * dg))
    else:
        val = float(np.sum(mid * (np.exp(-b * g[:-1]) - np.exp(-b * g[1:]))) / b)
    _check_tail(math.exp(-lam * sk.times[-1]) / math.sqrt(lam), tail_tol, sk.killed_at is not None)
    return val


def sample_lifetime_batch(
    p: ModelParams,
    x0: float,
    n: int,
    rng: RngStream,
    kill_rate: float | None = None,
    dt: float = 1e-3,
    window: int = 2048,
    censor: float | None = None,
    max_internal: float = 1e4,
) -> np.ndarray:
    """Vector of elastic lifetimes of the time-changed process.

    Internal-clock rule: draw a standard exponential E per path, locate
    s* = inf{s : local_time(s) > E/kill_rate} on a bridge-corrected
    reflected path from x0 (crossing time interpolated within the step),
    and return clock(s*) = s* + H((eta/sigma) * E/kill_rate) using one
    stable marginal draw for the subordinator value at that level.

    ``kill_rate`` defaults to c/sigma; passing c instead selects the other
    normalization convention.  The crossing level is heavy tailed, so with
    ``censor`` set the returned values are min(lifetime, censor) and the
    per-path simulation cost is bounded (lifetime >= s*, so paths may stop
    at internal time censor); without it a path exceeding ``max_internal``
    raises :class:`ConvergenceError`.  Draw layout: one uniform block for
    the thresholds, then normal/uniform window blocks over the still-active
    subset, then one stable block for all paths (censored ones included,
    keeping consumption independent of outcomes).
    """
    if not p.c > 0.0:
        raise InvalidParameterError("elastic lifetime requires c > 0")
    if x0 < 0.0 or n <= 0:
        raise InvalidParameterError("need x0 >= 0 and n > 0")
    if censor is not None and not censor > 0.0:
        raise InvalidParameterError("censor must be positive when given")
    rate = p.c / p.sigma if kill_rate is None else float(kill_rate)
    if not rate > 0.0:
        raise InvalidParameterError("kill_rate must be positive")
    gen = rng.generator
    thr = -np.log1p(-gen.random(n)) / rate
    pos = np.full(n, float(x0))
    loc = np.zeros(n)
    s_star = np.full(n, np.nan)
    active = np.arange(n)
    base = 0.0
    cap = max_internal if censor is None else censor
    scale = math.sqrt(2.0 * dt)
    while active.size:
        if base >= cap:
            if censor is None:
                raise ConvergenceError("local time did not reach the kill threshold", base)
            break
        inc = gen.standard_normal((active.size, window)) * scale
        log_u = np.log1p(-gen.random((active.size, window)))
        xs, ls = reflect_window(pos[active], loc[active], inc, log_u, dt)
        crossed = ls[:, -1] > thr[active]
        if crossed.any():
            rows = np.nonzero(crossed)[0]
            sub = ls[rows]
            first = np.argmax(sub > thr[active[rows]][:, None], axis=1)
            before = np.where(first > 0, sub[np.arange(rows.size), first - 1], loc[active[rows]])
            after = sub[np.arange(rows.size), first]
            frac = (thr[active[rows]] - before) / (after - before)
            s_star[active[rows]] = base + (first + frac) * dt
        pos[active] = xs[:, -1]
        loc[active] = ls[:, -1]
        active = active[~crossed]
        base += window * dt
    jump = positive_stable_array(p.alpha, p.stickiness * thr, n, gen)
    out = s_star + jump
    if censor is not None:
        out = np.where(np.isnan(s_star), censor, np.minimum(out, censor))
    return out


def sample_lifetime(
    p: ModelParams,
    x0: float,
    rng: RngStream,
    kill_rate: float | None = None,
    dt: float = 1e-3,
) -> float:
    """One elastic lifetime draw; see sample_lifetime_batch."""
    return float(sample_lifetime_batch(p, x0, 1, rng, kill_rate=kill_rate, dt=dt)[0])
