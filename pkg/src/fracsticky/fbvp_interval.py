"""Spectral and Monte Carlo solvers on the unit interval with mass-carrying endpoints.

The boundary condition at each endpoint ties the fractional time derivative
of the boundary value to the inward heat flux and an elastic drain:

    eta * D_t^alpha u(t, 0) = sigma * u_x(t, 0) - c * u(t, 0)
    eta * D_t^alpha u(t, 1) = -sigma * u_x(t, 1) - c * u(t, 1)

Two distinct solution objects live here and they agree only for alpha = 1.

* The spectral series (:func:`evaluate_series`) expands the datum in the
  eigenbasis of the condition above and evolves the two pieces on separate
  clocks: the interior restriction decays exponentially (classical), the
  endpoint restriction by Mittag-Leffler relaxation (fractional).  The sum
  solves the switching evolution whose clock depends on where the process
  sits, not the dynamic-boundary heat flow.
* The Monte Carlo route (:func:`mc_interval`) simulates the time-changed
  elastic path (two-sided reflection, combined endpoint local time feeding
  the subordinated sticky clock) and estimates the dynamic-boundary heat
  flow itself.

For alpha < 1 the two differ by O(1) amounts at moderate times; the
boundary traces are the objects tied together by the underlying theory.
Cross-checks between the routes therefore run at alpha = 1, while for
alpha < 1 each route is validated against its own independent oracle.

The eigenproblem is symmetric under x -> 1 - x, so eigenfunctions split
into a family vanishing at the midpoint and a family with vanishing slope
there; the boundary determinant factors accordingly and each factor has
exactly one root per bracketing cell, which makes the search exhaustive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from ._kernels import interval_reflect_window
from .errors import ConvergenceError, InvalidParameterError, MissedEigenvalueError
from .model import ModelParams
from .paths import PathSkeleton, build_frac_sticky_clock, compose_xbar
from .specfun import mittag_leffler
from .stats import McAccumulator
from .variates import RngStream

__all__ = [
    "SpectralBasis",
    "SeriesSolution",
    "solve_eigen",
    "project_datum",
    "evaluate_series",
    "mc_interval",
]

_BRACKET_EPS = 1e-9


def _det_residual(p: ModelParams, s: float) -> float:
    """Relative magnitude of the boundary determinant at s = sqrt(mu).

    det = (q^2 - (sigma s)^2) sin s + 2 q sigma s cos s with q = c - eta s^2;
    normalized by the coefficient scale so the value is comparable across k.
    """
    q = p.c - p.eta * s * s
    det = (q * q - (p.sigma * s) ** 2) * math.sin(s) + 2.0 * q * p.sigma * s * math.cos(s)
    return abs(det) / (1.0 + q * q + (p.sigma * s) ** 2)


def _half_angle_factor(p: ModelParams, s: float, family: str) -> float:
    q = p.c - p.eta * s * s
    if family == "node":
        return q * math.sin(0.5 * s) + p.sigma * s * math.cos(0.5 * s)
    return q * math.cos(0.5 * s) - p.sigma * s * math.sin(0.5 * s)


def _half_angle_slope(p: ModelParams, s: float, family: str) -> float:
    q = p.c - p.eta * s * s
    half_s, half_c = math.sin(0.5 * s), math.cos(0.5 * s)
    if family == "node":
        return -2.0 * p.eta * s * half_s + 0.5 * q * half_c + p.sigma * half_c - 0.5 * p.sigma * s * half_s
    return -2.0 * p.eta * s * half_c - 0.5 * q * half_s - p.sigma * half_s - 0.5 * p.sigma * s * half_c


def _polish(p: ModelParams, s: float, family: str, lo: float, hi: float) -> float:
    # two guarded Newton steps; brentq already has |ds| ~ rtol*s, this takes
    # the determinant residual to roundoff so the < 1e-10 invariant has slack
    for _ in range(2):
        g = _half_angle_factor(p, s, family)
        dg = _half_angle_slope(p, s, family)
        if dg == 0.0:
            break
        step = g / dg
        if not lo < s - step < hi:
            break
        s -= step
    return s


def _family_roots(p: ModelParams, family: str, count: int) -> list[float]:
    """First ``count`` positive roots of one determinant factor.

    "node" roots (eigenfunction vanishes at x = 1/2) live one per cell
    (2k pi, 2(k+1) pi); "slope" roots (derivative vanishes there) one per
    ((2k-1) pi, (2k+1) pi), plus one in (0, pi) exactly when c > 0.  The
    factor takes opposite signs at the cell ends, and a cotangent/tangent
    rewrite shows the crossing inside is unique, so bracketing cannot skip.
    """
    roots: list[float] = []
    if family == "slope" and p.c > 0.0:
        # the root deformed off s = 0 sits near sqrt(c / (eta + sigma/2))
        # for small c, so the bracket floor must scale with it
        lo = min(_BRACKET_EPS, 0.5 * math.sqrt(p.c / (p.eta + 0.5 * p.sigma)))
        hi = math.pi - _BRACKET_EPS
        if _half_angle_factor(p, lo, family) * _half_angle_factor(p, hi, family) < 0.0:
            s = brentq(lambda v: _half_angle_factor(p, v, family), lo, hi, xtol=1e-13)
            roots.append(_polish(p, s, family, lo, hi))
    k = 0
    while len(roots) < count:
        if family == "node":
            lo = 2.0 * k * math.pi + (_BRACKET_EPS if k == 0 else 0.0)
            hi = 2.0 * (k + 1) * math.pi
        else:
            lo = (2 * k + 1) * math.pi
            hi = (2 * k + 3) * math.pi
        s = brentq(lambda v: _half_angle_factor(p, v, family), lo, hi, xtol=1e-13)
        roots.append(_polish(p, s, family, lo, hi))
        k += 1
    return roots


def _mode_norm(beta: float, s: float, a: float, b: float) -> float:
    """m-norm of a*cos(s x) + b*sin(s x): interior integral plus endpoint masses."""
    if s == 0.0:
        interior = a * a
        end0, end1 = a, a
    else:
        two_s = 2.0 * s
        interior = (
            0.5 * (a * a + b * b)
            + (a * a - b * b) * math.sin(two_s) / (2.0 * two_s)
            + a * b * (1.0 - math.cos(two_s)) / two_s
        )
        end0 = a
        end1 = a * math.cos(s) + b * math.sin(s)
    return math.sqrt(interior + beta * (end0 * end0 + end1 * end1))


@dataclass(frozen=True)
class SpectralBasis:
    """Orthonormal eigenmodes of the endpoint-weighted Laplacian.

    psi_k(x) = A_k cos(sqrt(mu_k) x) + B_k sin(sqrt(mu_k) x), normalized in
    the inner product <f, g> = int_0^1 f g dx + beta (f(0)g(0) + f(1)g(1))
    with beta = eta/sigma, and signed so psi_k(0) > 0.
    """

    params: ModelParams
    eigenvalues: np.ndarray
    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray
    boundary_weight: float

    def __post_init__(self):
        mu = np.asarray(self.eigenvalues, dtype=float)
        a = np.asarray(self.cos_coeffs, dtype=float)
        b = np.asarray(self.sin_coeffs, dtype=float)
        if not (mu.ndim == 1 and mu.shape == a.shape == b.shape and mu.size >= 1):
            raise InvalidParameterError("eigenvalues and coefficients must be equal-length 1-d arrays")
        if mu[0] < 0.0 or np.any(np.diff(mu) <= 0.0):
            raise InvalidParameterError("eigenvalues must be nonnegative and strictly increasing")
        if not self.boundary_weight > 0.0:
            raise InvalidParameterError("boundary_weight must be positive")
        object.__setattr__(self, "eigenvalues", mu)
        object.__setattr__(self, "cos_coeffs", a)
        object.__setattr__(self, "sin_coeffs", b)

    @property
    def count(self) -> int:
        return self.eigenvalues.size

    @property
    def eigenfunctions(self) -> tuple[Callable[[float], float], ...]:
        return tuple(
            (lambda x, s=math.sqrt(m), a=a, b=b: a * np.cos(s * np.asarray(x, dtype=float)) + b * np.sin(s * np.asarray(x, dtype=float)))
            for m, a, b in zip(self.eigenvalues, self.cos_coeffs, self.sin_coeffs)
        )

    def mode_matrix(self, x) -> np.ndarray:
        """psi_k(x_j) as an array of shape (count, len(x))."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        s = np.sqrt(self.eigenvalues)[:, None]
        return self.cos_coeffs[:, None] * np.cos(s * x[None, :]) + self.sin_coeffs[:, None] * np.sin(s * x[None, :])

    def residuals(self) -> np.ndarray:
        """Normalized boundary-determinant magnitude per mode."""
        out = np.empty(self.count)
        for k, m in enumerate(self.eigenvalues):
            if m == 0.0:
                # constant mode: both conditions reduce to c * psi = 0
                out[k] = abs(self.params.c)
            else:
                out[k] = _det_residual(self.params, math.sqrt(m))
        return out

    def gram_matrix(self, n_nodes: int | None = None) -> np.ndarray:
        """Weighted Gram matrix by Gauss-Legendre quadrature (independent of
        the orthogonality identity the eigensolve relies on)."""
        if n_nodes is None:
            n_nodes = max(256, 8 * self.count + 32)
        nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
        x = 0.5 * (nodes + 1.0)
        w = 0.5 * weights
        psi = self.mode_matrix(x)
        g = (psi * w[None, :]) @ psi.T
        ends = self.mode_matrix(np.array([0.0, 1.0]))
        g += self.boundary_weight * (np.outer(ends[:, 0], ends[:, 0]) + np.outer(ends[:, 1], ends[:, 1]))
        return g

    def to_csv(self, path) -> None:
        rows = ["k,mu,A,B"]
        for k in range(self.count):
            rows.append(
                f"{k},{self.eigenvalues[k]:.17g},{self.cos_coeffs[k]:.17g},{self.sin_coeffs[k]:.17g}"
            )
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")


def _interior_zeros(mu: float, a: float, b: float) -> int:
    """Exact interior zero count of a cos(sqrt(mu) x) + b sin(sqrt(mu) x).

    The mode is R cos(s x - phi); its endpoint values never vanish (a zero
    value plus the flux condition would force the mode to vanish), so zeros
    near 0 or 1 need no tolerance.  High modes have zeros within O(1/mu) of
    the endpoints, which a probe grid would miss; the phase count is exact.
    """
    if mu == 0.0:
        return 0
    s = math.sqrt(mu)
    phi = math.atan2(b, a)
    span = s - phi - 0.5 * math.pi
    return 0 if span <= 0.0 else int(math.floor(span / math.pi)) + 1


def _oscillation_check(basis: SpectralBasis) -> None:
    # Sturm property: the k-th mode changes sign exactly k times inside
    for k in range(basis.count):
        flips = _interior_zeros(basis.eigenvalues[k], basis.cos_coeffs[k], basis.sin_coeffs[k])
        if flips != k:
            lo = basis.eigenvalues[k - 1] if k else 0.0
            raise MissedEigenvalueError(
                f"mode {k} has {flips} interior sign changes, expected {k}: "
                f"an eigenvalue between mu={lo:.6g} and mu={basis.eigenvalues[k]:.6g} was missed"
            )


def solve_eigen(p: ModelParams, K: int) -> SpectralBasis:
    """First K eigenpairs of the endpoint-weighted eigenproblem.

    Eigenvalues solve the 2x2 boundary determinant in s = sqrt(mu); the
    determinant factors over the midpoint symmetry and each factor is
    bracketed on its guaranteed cells (asymptotically the integer-pi grid)
    and polished by Newton steps.  For c = 0 the constant mode mu_0 = 0 is
    exact.  The Sturm sign-change count of every returned mode is verified
    and a mismatch raises :class:`MissedEigenvalueError` naming the gap.
    """
    if not isinstance(K, (int, np.integer)) or K < 1:
        raise InvalidParameterError(f"K must be a positive integer, got {K!r}")
    per_family = K // 2 + 2
    tagged = [(s, "node") for s in _family_roots(p, "node", per_family)]
    tagged += [(s, "slope") for s in _family_roots(p, "slope", per_family)]
    tagged.sort()
    beta = p.stickiness
    modes: list[tuple[float, float, float]] = []
    if p.c == 0.0:
        modes.append((0.0, 1.0 / math.sqrt(1.0 + 2.0 * beta), 0.0))
    for s, _family in tagged:
        # psi(0) = A cannot vanish (it would force psi = 0), so A = 1 seeds
        # every mode and the normalized sign convention psi_k(0) > 0 is free
        a = 1.0
        b = (p.c - p.eta * s * s) / (p.sigma * s)
        nrm = _mode_norm(beta, s, a, b)
        modes.append((s * s, a / nrm, b / nrm))
        if len(modes) == K:
            break
    modes = modes[:K]
    basis = SpectralBasis(
        params=p,
        eigenvalues=np.array([m[0] for m in modes]),
        cos_coeffs=np.array([m[1] for m in modes]),
        sin_coeffs=np.array([m[2] for m in modes]),
        boundary_weight=beta,
    )
    _oscillation_check(basis)
    return basis


@dataclass(frozen=True)
class SeriesSolution:
    """Datum expanded in a SpectralBasis, with the relaxation order alpha.

    ``interior_coeffs`` come from the interior restriction of the datum,
    ``boundary_coeffs`` from its endpoint values under the weighted masses;
    at t = 0 the two add up to the full expansion of the datum.
    ``datum_energy`` is <f, f> in the weighted inner product, kept so the
    truncated Parseval tail is measurable.
    """

    basis: SpectralBasis
    interior_coeffs: np.ndarray
    boundary_coeffs: np.ndarray
    alpha: float
    datum_energy: float

    def __post_init__(self):
        ci = np.asarray(self.interior_coeffs, dtype=float)
        cb = np.asarray(self.boundary_coeffs, dtype=float)
        if ci.shape != (self.basis.count,) or cb.shape != (self.basis.count,):
            raise InvalidParameterError("coefficient arrays must match the basis count")
        if not 0.0 < self.alpha <= 1.0:
            raise InvalidParameterError(f"alpha must be in (0, 1], got {self.alpha}")
        if not self.datum_energy > 0.0:
            raise InvalidParameterError("datum_energy must be positive")
        object.__setattr__(self, "interior_coeffs", ci)
        object.__setattr__(self, "boundary_coeffs", cb)

    @property
    def tail_energy_fraction(self) -> float:
        """Parseval remainder: share of the datum energy the basis misses."""
        captured = float(np.sum((self.interior_coeffs + self.boundary_coeffs) ** 2))
        return max(0.0, 1.0 - captured / self.datum_energy)


def project_datum(basis: SpectralBasis, f: Callable[[float], float], alpha: float) -> SeriesSolution:
    """Expand a bounded datum on [0, 1] in the basis.

    Interior coefficients by Gauss-Legendre quadrature at a node count tied
    to the top frequency; boundary coefficients are the weighted endpoint
    products beta * (f(0) psi(0) + f(1) psi(1)).
    """
    if not callable(f):
        raise InvalidParameterError("f must be callable on [0, 1]")
    n_nodes = max(256, 8 * basis.count + 32)
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    x = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    fx = np.array([float(f(float(xi))) for xi in x])
    if not np.all(np.isfinite(fx)):
        raise InvalidParameterError("datum must be finite on [0, 1]")
    f0, f1 = float(f(0.0)), float(f(1.0))
    psi = basis.mode_matrix(x)
    interior = psi @ (w * fx)
    ends = basis.mode_matrix(np.array([0.0, 1.0]))
    beta = basis.boundary_weight
    boundary = beta * (f0 * ends[:, 0] + f1 * ends[:, 1])
    energy = float(np.dot(w, fx * fx)) + beta * (f0 * f0 + f1 * f1)
    return SeriesSolution(basis, interior, boundary, float(alpha), energy)


def _required_count(sol: SeriesSolution, tol: float) -> int:
    # fit the per-mode energy decay on the top half and extrapolate the
    # count at which the Parseval remainder would fall under tol
    e = (sol.interior_coeffs + sol.boundary_coeffs) ** 2
    k = np.arange(1, e.size + 1, dtype=float)
    top = slice(e.size // 2, None)
    pos = e[top] > 0.0
    if not np.any(pos):
        return sol.basis.count
    slope, _ = np.polyfit(np.log(k[top][pos]), np.log(e[top][pos]), 1)
    decay = max(1.5, -slope)
    # tail(K) ~ K^(1 - decay)
    frac = sol.tail_energy_fraction
    grow = (frac / tol) ** (1.0 / (decay - 1.0))
    return min(int(sol.basis.count * grow) + 1, 10**6)


def evaluate_series(
    sol: SeriesSolution, t: float, x, tail_tol: float | None = None
) -> tuple[float, float] | tuple[np.ndarray, np.ndarray]:
    """Interior-clock and endpoint-clock parts of the series at time t.

    Returns (interior_part, boundary_part): the first is the expansion of
    the interior restriction under exponential decay exp(-mu_k t), the
    second the endpoint restriction under Mittag-Leffler decay
    E_alpha(-mu_k t^alpha).  Their sum reproduces the datum at t = 0; for
    alpha = 1 the sum is the classical evolution of the whole datum.  With
    ``tail_tol`` given, a Parseval remainder above it raises
    :class:`ConvergenceError` estimating the basis size that would do.
    """
    if not t >= 0.0:
        raise InvalidParameterError(f"t must be nonnegative, got {t}")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa < 0.0) or np.any(xa > 1.0):
        raise InvalidParameterError("x must lie in [0, 1]")
    if tail_tol is not None and sol.tail_energy_fraction > tail_tol:
        need = _required_count(sol, tail_tol)
        raise ConvergenceError(
            f"Parseval tail {sol.tail_energy_fraction:.3e} exceeds {tail_tol:.3e}; "
            f"about K = {need} modes would be needed",
            achieved_bound=sol.tail_energy_fraction,
        )
    mu = sol.basis.eigenvalues
    decay_int = np.exp(-mu * t)
    if sol.alpha == 1.0:
        decay_bnd = decay_int
    else:
        ts = t**sol.alpha
        decay_bnd = np.array([mittag_leffler(sol.alpha, -m * ts) for m in mu])
    psi = sol.basis.mode_matrix(xa)
    interior = (sol.interior_coeffs * decay_int) @ psi
    boundary = (sol.boundary_coeffs * decay_bnd) @ psi
    if np.isscalar(x) or np.asarray(x).ndim == 0:
        return float(interior[0]), float(boundary[0])
    return interior, boundary


_WINDOW = 8192


def mc_interval(
    p: ModelParams,
    f: Callable[[float], float],
    t_grid,
    x0: float,
    n_paths: int,
    rng: RngStream,
    dt: float = 5e-4,
    chunk: int = 512,
) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo estimate of the dynamic-boundary heat flow on [0, 1].

    Estimates E_x0[f(position at t) * exp(-(c/sigma) * combined local time
    at t)] along the time-changed two-sided path: reflection at both
    endpoints, the two Skorokhod pushing terms summed into one boundary
    clock that feeds the subordinated sticky time change, and the elastic
    factor applied as a weight.  Returns (mean, se) arrays over ``t_grid``
    (scalars for scalar t).
    """
    t_arr = np.atleast_1d(np.asarray(t_grid, dtype=float))
    scalar = np.isscalar(t_grid) or np.asarray(t_grid).ndim == 0
    if not 0.0 <= x0 <= 1.0:
        raise InvalidParameterError(f"x0 must lie in [0, 1], got {x0}")
    if n_paths < 10_000:
        raise InvalidParameterError("n_paths must be at least 10^4 for a usable estimate")
    if np.any(t_arr <= 0.0):
        raise InvalidParameterError("need t > 0")
    if not dt > 0.0:
        raise InvalidParameterError("dt must be positive")
    t_max = float(np.max(t_arr))
    steps = int(math.ceil(t_max / dt)) + 2
    grid = np.arange(steps + 1) * dt
    p_free = replace(p, c=0.0)
    acc = [McAccumulator() for _ in t_arr]
    done = 0
    chunk_id = 0
    scale = math.sqrt(2.0 * dt)
    while done < n_paths:
        m = min(chunk, n_paths - done)
        sub = rng.substream(chunk_id)
        chunk_id += 1
        gen = sub.generator
        pos = np.empty((m, steps + 1))
        loc = np.empty((m, steps + 1))
        pos[:, 0] = x0
        loc[:, 0] = 0.0
        cur_x = np.full(m, float(x0))
        cur_l0 = np.zeros(m)
        cur_l1 = np.zeros(m)
        for start in range(0, steps, _WINDOW):
            w = min(_WINDOW, steps - start)
            inc = gen.standard_normal((m, w)) * scale
            log_u0 = np.log1p(-gen.random((m, w)))
            log_u1 = np.log1p(-gen.random((m, w)))
            xs, l0, l1 = interval_reflect_window(cur_x, cur_l0, cur_l1, inc, log_u0, log_u1, dt)
            pos[:, start + 1 : start + 1 + w] = xs
            loc[:, start + 1 : start + 1 + w] = np.asarray(l0) + np.asarray(l1)
            cur_x = np.asarray(xs)[:, -1].copy()
            cur_l0 = np.asarray(l0)[:, -1].copy()
            cur_l1 = np.asarray(l1)[:, -1].copy()
        for i in range(m):
            sk = PathSkeleton(grid, pos[i], loc[i])
            clock, _ = build_frac_sticky_clock(p, sk, sub)
            xb = compose_xbar(p_free, sk, clock, sub, t_max=t_max + 2.0 * dt)
            pos_t = np.interp(t_arr, xb.times, xb.positions)
            lev_t = np.interp(t_arr, xb.times, xb.local_time)
            weight = np.exp(-(p.c / p.eta) * lev_t)
            for k, a in enumerate(acc):
                a.add(float(f(float(pos_t[k]))) * float(weight[k]))
        done += m
    mean = np.array([a.mean for a in acc])
    se = np.array([a.se for a in acc])
    if scalar:
        return float(mean[0]), float(se[0])
    return mean, se
