"""Vectorized (numpy) implementations of the per-path sequential kernels.

All randomness is consumed from pre-drawn arrays so that both backends see
the same draw for the same (path, slot) pair; kernels are deterministic
functions of their inputs.  Positions evolve under the generator d^2/dx^2,
so a step of length dt carries noise of variance 2*dt and the within-step
bridge minimum m over [a, b] satisfies P(m < z) = exp(-(a-z)(b-z)/dt).
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["reflect_window", "hat_chain_chunk", "interval_reflect_window"]

# draw slots per renewal cycle of the boundary-excursion chain:
# hold exponential, stable pair for the hold, excursion-length uniform,
# stable pair for the excursion
HAT_SLOTS = 6


def reflect_window(x_prev, l_prev, increments, log_u, dt):
    """Advance reflected paths on the half line through one window.

    :param x_prev: positions at the window start, shape (n,)
    :param l_prev: accumulated boundary local time at the window start, (n,)
    :param increments: free-motion increments, N(0, 2*dt), shape (n, w)
    :param log_u: log of bridge uniforms, shape (n, w), entries <= 0
    :param dt: step size
    :returns: (x, l) trajectories of shape (n, w) sampled at step ends

    The reflection map restarts at the window boundary (Markov property),
    so l carries the running total.  A step strictly increases l exactly
    when the reflected path touched zero during that step.
    """
    free = x_prev[:, None] + np.cumsum(increments, axis=1)
    start = np.empty_like(free)
    start[:, 0] = x_prev
    start[:, 1:] = free[:, :-1]
    # bridge minimum: solves (start - m)(end - m) = -dt * log U
    disc = (free - start) ** 2 - (4.0 * dt) * log_u
    bridge_min = 0.5 * ((free + start) - np.sqrt(disc))
    run_min = np.minimum.accumulate(bridge_min, axis=1)
    win_l = np.maximum(-run_min, 0.0)
    x = free + win_l
    l = l_prev[:, None] + win_l
    return x, l


def interval_reflect_window(x_prev, l0_prev, l1_prev, increments, log_u0, log_u1, dt):
    """Advance paths reflected at both endpoints of [0, 1] through one window.

    Per step the one-wall bridge corrections at 0 and 1 are applied
    independently; a double hit within one step has probability
    exp(-O(1/dt)) and is ignored.

    :returns: (x, l0, l1) trajectories of shape (n, w)
    """
    n, w = increments.shape
    x = np.empty((n, w))
    l0 = np.empty((n, w))
    l1 = np.empty((n, w))
    pos = x_prev.copy()
    acc0 = l0_prev.copy()
    acc1 = l1_prev.copy()
    four_dt = 4.0 * dt
    for j in range(w):
        end = pos + increments[:, j]
        gap_sq = (end - pos) ** 2
        low = 0.5 * ((pos + end) - np.sqrt(gap_sq - four_dt * log_u0[:, j]))
        high = 0.5 * ((pos + end) + np.sqrt(gap_sq - four_dt * log_u1[:, j]))
        push0 = np.maximum(-low, 0.0)
        push1 = np.maximum(high - 1.0, 0.0)
        pos = np.clip(end + push0 - push1, 0.0, 1.0)
        acc0 = acc0 + push0
        acc1 = acc1 + push1
        x[:, j] = pos
        l0[:, j] = acc0
        l1[:, j] = acc1
    return x, l0, l1


def _stable_standard(u, e, alpha, inv_alpha):
    """Kanter draw of the standard alpha-stable subordinator at time 1.

    Laplace transform exp(-s^alpha).  u, e are uniforms in [0, 1); the
    angle is mapped to (0, pi] to avoid sin(0) in the denominator.
    """
    w = math.pi * (1.0 - u)
    ratio = (1.0 - alpha) * inv_alpha
    with np.errstate(divide="ignore", over="ignore"):
        expo = -np.log1p(-e)
        core = np.sin(alpha * w) / np.sin(w) ** inv_alpha
        core = core * np.sin((1.0 - alpha) * w) ** ratio
        return core * expo**-ratio


def hat_chain_chunk(u, budget, acc, alive, draws, alpha, rate, delta, lambdas, horizon):
    """Run renewal cycles of the subordinated boundary-excursion chain.

    Each cycle consumes HAT_SLOTS draws per path from ``draws`` (shape
    (n, HAT_SLOTS * cycles)): an exponential boundary hold at ``rate`` on
    the pre-subordination clock and a heavy-tailed excursion of law
    delta/U^2, both pushed through an independent alpha-stable
    subordinator.  Boundary occupation time grows at unit slope during
    subordinated holds.  The elastic kill ``budget`` runs on the
    pre-subordination hold clock (the level clock); a hold exceeding the
    remaining budget is truncated at the kill level and only the surviving
    part is stretched, which is exact in law by independent increments.
    ``acc[:, i] += integral exp(-lambdas[i] * s) ds`` over each hold,
    censored at the kill time and at ``horizon``.

    Arrays u, budget, acc, alive are updated in place; returns the number
    of paths still running (alive and strictly before the horizon).
    """
    n, width = draws.shape
    cycles = width // HAT_SLOTS
    inv_alpha = 1.0 / alpha
    lam = np.asarray(lambdas, dtype=float)
    for cyc in range(cycles):
        act = np.nonzero(alive & (u < horizon))[0]
        if act.size == 0:
            break
        base = HAT_SLOTS * cyc
        hold = -np.log1p(-draws[act, base]) / rate
        killed = hold >= budget[act]
        h_eff = np.minimum(hold, budget[act])
        budget[act] -= h_eff
        s_hold = _stable_standard(draws[act, base + 1], draws[act, base + 2], alpha, inv_alpha)
        stay = h_eff**inv_alpha * s_hold
        start = u[act]
        stop = np.minimum(start + stay, horizon)
        with np.errstate(over="ignore"):
            acc[act] += (np.exp(-start[:, None] * lam) - np.exp(-stop[:, None] * lam)) / lam
        u[act] = start + stay
        alive[act] &= ~killed
        # excursion away from the boundary; contributes duration only
        exc = delta / (1.0 - draws[act, base + 3]) ** 2
        s_exc = _stable_standard(draws[act, base + 4], draws[act, base + 5], alpha, inv_alpha)
        u[act] += exc**inv_alpha * s_exc
    return int(np.count_nonzero(alive & (u < horizon)))
