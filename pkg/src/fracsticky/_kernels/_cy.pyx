# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled mirrors of the numpy kernels.

Same draw layout per (path, slot) as numpy_backend, fused per path instead
of vectorized across paths.  reflect_window and interval_reflect_window use
only IEEE-exact arithmetic and reproduce the numpy backend bit for bit; the
excursion chain goes through libm exp/log/pow and may differ in the last
ulp, so cross-backend identity there is distributional, not bitwise.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, M_PI, exp, fmax, fmin, log1p, pow, sin, sqrt

cnp.import_array()

HAT_SLOTS = 6


def reflect_window(x_prev, l_prev, increments, log_u, double dt):
    cdef double[:] xp = np.ascontiguousarray(x_prev, dtype=np.float64)
    cdef double[:] lp = np.ascontiguousarray(l_prev, dtype=np.float64)
    cdef double[:, :] inc = np.ascontiguousarray(increments, dtype=np.float64)
    cdef double[:, :] lu = np.ascontiguousarray(log_u, dtype=np.float64)
    cdef Py_ssize_t n = inc.shape[0], w = inc.shape[1], i, j
    x_arr = np.empty((n, w))
    l_arr = np.empty((n, w))
    cdef double[:, :] x = x_arr
    cdef double[:, :] l = l_arr
    cdef double four_dt = 4.0 * dt
    # one floatingOP per statement, mirroring the numpy expression tree
    # exactly (free path is x0 + running increment sum, not a fused
    # accumulation) so both backends round identically; fused multiply-adds
    # would break that, hence no a*b - c in a single expression
    cdef double x0, base, cum, free_old, free_new, run_min
    cdef double gap, gap_sq, corr, disc, root, ssum, half, m, win_l
    for i in range(n):
        x0 = xp[i]
        base = lp[i]
        cum = 0.0
        free_old = x0
        run_min = INFINITY
        for j in range(w):
            cum = cum + inc[i, j]
            free_new = x0 + cum
            gap = free_new - free_old
            gap_sq = gap * gap
            corr = four_dt * lu[i, j]
            disc = gap_sq - corr
            root = sqrt(disc)
            ssum = free_new + free_old
            half = ssum - root
            m = 0.5 * half
            if m < run_min:
                run_min = m
            win_l = fmax(-run_min, 0.0)
            x[i, j] = free_new + win_l
            l[i, j] = base + win_l
            free_old = free_new
    return x_arr, l_arr


def interval_reflect_window(x_prev, l0_prev, l1_prev, increments, log_u0, log_u1, double dt):
    cdef double[:] xp = np.ascontiguousarray(x_prev, dtype=np.float64)
    cdef double[:] l0p = np.ascontiguousarray(l0_prev, dtype=np.float64)
    cdef double[:] l1p = np.ascontiguousarray(l1_prev, dtype=np.float64)
    cdef double[:, :] inc = np.ascontiguousarray(increments, dtype=np.float64)
    cdef double[:, :] lu0 = np.ascontiguousarray(log_u0, dtype=np.float64)
    cdef double[:, :] lu1 = np.ascontiguousarray(log_u1, dtype=np.float64)
    cdef Py_ssize_t n = inc.shape[0], w = inc.shape[1], i, j
    x_arr = np.empty((n, w))
    l0_arr = np.empty((n, w))
    l1_arr = np.empty((n, w))
    cdef double[:, :] x = x_arr
    cdef double[:, :] l0 = l0_arr
    cdef double[:, :] l1 = l1_arr
    cdef double four_dt = 4.0 * dt
    # single-op statements for bitwise agreement with the numpy backend,
    # see reflect_window
    cdef double pos, end, gap, gap_sq, corr0, corr1, arg0, arg1
    cdef double root0, root1, psum, d0, d1, low, high, push0, push1
    cdef double tmp, a0, a1
    for i in range(n):
        pos = xp[i]
        a0 = l0p[i]
        a1 = l1p[i]
        for j in range(w):
            end = pos + inc[i, j]
            gap = end - pos
            gap_sq = gap * gap
            corr0 = four_dt * lu0[i, j]
            arg0 = gap_sq - corr0
            root0 = sqrt(arg0)
            psum = pos + end
            d0 = psum - root0
            low = 0.5 * d0
            corr1 = four_dt * lu1[i, j]
            arg1 = gap_sq - corr1
            root1 = sqrt(arg1)
            d1 = psum + root1
            high = 0.5 * d1
            push0 = fmax(-low, 0.0)
            push1 = fmax(high - 1.0, 0.0)
            tmp = end + push0
            pos = tmp - push1
            if pos < 0.0:
                pos = 0.0
            elif pos > 1.0:
                pos = 1.0
            a0 = a0 + push0
            a1 = a1 + push1
            x[i, j] = pos
            l0[i, j] = a0
            l1[i, j] = a1
    return x_arr, l0_arr, l1_arr


cdef inline double stable_std(double u, double e, double alpha, double inv_alpha) nogil:
    cdef double w_ang = M_PI * (1.0 - u)
    cdef double ratio = (1.0 - alpha) * inv_alpha
    cdef double expo = -log1p(-e)
    cdef double core = sin(alpha * w_ang) / pow(sin(w_ang), inv_alpha)
    core = core * pow(sin((1.0 - alpha) * w_ang), ratio)
    return core * pow(expo, -ratio)


def hat_chain_chunk(u, budget, acc, alive, draws, double alpha, double rate,
                    double delta, lambdas, double horizon):
    cdef double[:] uu = u
    cdef double[:] bb = budget
    cdef double[:, :] aa = acc
    cdef unsigned char[:] al = alive.view(np.uint8)
    cdef double[:, :] dd = np.ascontiguousarray(draws, dtype=np.float64)
    cdef double[:] lam = np.ascontiguousarray(lambdas, dtype=np.float64)
    cdef Py_ssize_t n = dd.shape[0], cycles = dd.shape[1] // HAT_SLOTS
    cdef Py_ssize_t n_lam = lam.shape[0], i, cyc, k, base
    cdef double inv_alpha = 1.0 / alpha
    cdef double hold, h_eff, s_hold, stay, start, stop, exc, s_exc
    cdef int killed, running = 0
    for i in range(n):
        for cyc in range(cycles):
            if not al[i] or uu[i] >= horizon:
                break
            base = HAT_SLOTS * cyc
            hold = -log1p(-dd[i, base]) / rate
            killed = hold >= bb[i]
            h_eff = fmin(hold, bb[i])
            bb[i] -= h_eff
            s_hold = stable_std(dd[i, base + 1], dd[i, base + 2], alpha, inv_alpha)
            stay = pow(h_eff, inv_alpha) * s_hold
            start = uu[i]
            stop = fmin(start + stay, horizon)
            for k in range(n_lam):
                aa[i, k] += (exp(-start * lam[k]) - exp(-stop * lam[k])) / lam[k]
            uu[i] = start + stay
            if killed:
                al[i] = 0
            exc = delta / ((1.0 - dd[i, base + 3]) * (1.0 - dd[i, base + 3]))
            s_exc = stable_std(dd[i, base + 4], dd[i, base + 5], alpha, inv_alpha)
            uu[i] += pow(exc, inv_alpha) * s_exc
        if al[i] and uu[i] < horizon:
            running += 1
    return running
