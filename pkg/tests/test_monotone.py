import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracsticky.errors import InvalidParameterError
from fracsticky.monotone import MonotoneFn, generalized_inverse


def staircase(n):
    # floor function on [0, n] with explicit jump knots (duplicated abscissae)
    k = np.arange(1.0, n + 1)
    s = np.concatenate([[0.0], np.repeat(k, 2)])
    v = np.concatenate([[0.0, 0.0], np.repeat(k, 2)[:-1]])
    return MonotoneFn(s, v)


class TestEvaluation:
    def test_identity(self):
        f = MonotoneFn(np.array([0.0, 10.0]), np.array([0.0, 10.0]))
        t = np.linspace(0.0, 10.0, 23)
        assert np.allclose(f(t), t, atol=1e-14)

    def test_right_continuity_at_jump(self):
        f = MonotoneFn(np.array([0.0, 1.0, 1.0, 2.0]), np.array([0.0, 0.0, 3.0, 3.0]))
        assert f(1.0) == 3.0
        assert f(0.999999) == pytest.approx(0.0, abs=1e-5)

    def test_linear_interpolation(self):
        f = MonotoneFn(np.array([0.0, 2.0]), np.array([1.0, 5.0]))
        assert f(0.5) == pytest.approx(2.0)

    def test_clamps_below_domain(self):
        f = MonotoneFn(np.array([1.0, 2.0]), np.array([4.0, 5.0]))
        assert f(0.0) == 4.0

    def test_scalar_shape(self):
        f = MonotoneFn(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
        out = f(0.5)
        assert np.ndim(out) == 0

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            MonotoneFn(np.array([0.0, 1.0]), np.array([1.0, 0.0]))
        with pytest.raises(InvalidParameterError):
            MonotoneFn(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
        with pytest.raises(InvalidParameterError):
            MonotoneFn(np.array([]), np.array([]))


class TestGeneralizedInverse:
    def test_identity_inverse(self):
        f = MonotoneFn(np.array([0.0, 7.0]), np.array([0.0, 7.0]))
        g = generalized_inverse(f)
        t = np.linspace(0.0, 6.9, 31)
        assert np.allclose(g(t), t, atol=1e-14)

    def test_staircase_floor(self):
        f = staircase(5)
        g = generalized_inverse(f)
        for t in [0.0, 0.3, 1.0, 1.7, 2.5, 3.999, 4.0]:
            assert g(t) == pytest.approx(np.floor(t) + 1.0)

    def test_beyond_top_is_infinite(self):
        f = staircase(3)
        g = generalized_inverse(f)
        assert g(10.0) == np.inf

    def test_jump_becomes_plateau(self):
        f = MonotoneFn(np.array([0.0, 1.0, 1.0, 2.0]), np.array([0.0, 1.0, 4.0, 5.0]))
        g = generalized_inverse(f)
        # on the jump gap (1, 4) the inverse sits at the jump location
        assert np.allclose(g(np.array([1.5, 2.0, 3.9])), 1.0)

    def test_plateau_becomes_jump(self):
        f = MonotoneFn(np.array([0.0, 1.0, 3.0, 4.0]), np.array([0.0, 2.0, 2.0, 5.0]))
        g = generalized_inverse(f)
        # inf{s: f(s) > 2} = 3: the whole plateau maps beyond its right end
        assert g(2.0) == pytest.approx(3.0)
        assert g(1.999999) == pytest.approx(1.0, abs=1e-5)

    def test_round_trip_strictly_increasing(self):
        s = np.array([0.0, 0.5, 1.25, 2.0, 3.0])
        v = np.array([0.0, 1.0, 1.5, 4.0, 9.0])
        f = MonotoneFn(s, v)
        g = generalized_inverse(f)
        assert np.allclose(g(f(s[:-1])), s[:-1], atol=1e-12)


@st.composite
def monotone_pairs(draw):
    n = draw(st.integers(min_value=2, max_value=12))
    ds = draw(st.lists(st.floats(0.01, 2.0), min_size=n, max_size=n))
    dv = draw(st.lists(st.floats(0.0, 3.0), min_size=n, max_size=n))
    s = np.cumsum(np.asarray(ds))
    v = np.cumsum(np.asarray(dv))
    return MonotoneFn(s, v)


class TestProperties:
    @given(monotone_pairs(), st.floats(0.0, 20.0))
    @settings(max_examples=200, deadline=None)
    def test_inverse_is_nondecreasing_and_galois(self, f, t):
        g = generalized_inverse(f)
        lo, hi = f.v[0], f.v[-1]
        t = lo + (hi - lo) * min(t / 20.0, 1.0)
        if t >= hi:
            return
        s_star = float(g(t))
        # definition: g(t) = inf{s : f(s) > t}, so f just right of g(t) exceeds t
        probe = min(s_star + 1e-9 * max(1.0, abs(s_star)), f.s[-1])
        assert float(f(probe)) >= t - 1e-7

    @given(monotone_pairs())
    @settings(max_examples=100, deadline=None)
    def test_inverse_monotone(self, f):
        if f.v[-1] - f.v[0] < 1e-6:
            return
        g = generalized_inverse(f)
        t = np.linspace(f.v[0], f.v[-1] - 1e-9, 50)
        gt = g(t)
        assert np.all(np.diff(gt) >= -1e-12)


class TestChangeOfVariables:
    def test_stieltjes_substitution_against_brute_force(self):
        # clock with a linear ramp, a plateau, a jump, then another ramp
        s = np.array([0.0, 1.0, 2.5, 2.5, 4.0])
        v = np.array([0.0, 2.0, 2.0, 3.5, 5.0])
        clock = MonotoneFn(s, v)
        inv = generalized_inverse(clock)
        phi = np.exp

        # left side: int_0^{V(T)} phi(V^{-1}(u)) du on a fine grid
        u = np.arange(0.0, 5.0, 1e-4)
        lhs = float(np.trapezoid(phi(-inv(u)), u))

        # right side: Stieltjes integral int phi(s) dV(s) by brute force:
        # continuous parts on a fine grid plus the jump at s = 2.5
        rhs = 0.0
        for a, b, va, vb in [(0.0, 1.0, 0.0, 2.0), (2.5, 4.0, 3.5, 5.0)]:
            grid = np.arange(a, b, 1e-4)
            slope = (vb - va) / (b - a)
            rhs += float(np.sum(phi(-0.5 * (grid + np.minimum(grid + 1e-4, b))) * slope * 1e-4))
        rhs += float(phi(-2.5) * 1.5)
        assert lhs == pytest.approx(rhs, abs=2e-3)


class TestShift:
    def test_shift_values(self):
        f = MonotoneFn(np.array([0.0, 1.0]), np.array([2.0, 3.0]))
        h = f.shift_values(-2.0)
        assert h(0.0) == 0.0 and h(1.0) == 1.0
