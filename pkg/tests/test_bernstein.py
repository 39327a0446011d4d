import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate
from strategies import prony_materials, prony_reps

from viscolevy import (
    Analytic,
    BernsteinRep,
    Composed,
    LevyMeasure,
    Stable,
    bernstein_check,
    canonicalize,
    compose,
    dashpot,
    eval_derivative,
    eval_impulse,
    kelvin_voigt,
    laplace_fprime,
    maxwell,
    series,
    spring,
    stable_material,
)
from viscolevy.errors import InvalidParameterError, UnsupportedRepresentationError, ZeroMaterialError
from viscolevy.numerics import TimeGrid


class TestEvalImpulse:
    def test_spring(self):
        assert eval_impulse(spring(2), 3.0) == 0.5

    def test_stable_half(self):
        # c = 1 gives f(t) = 2 sqrt(t/pi)
        assert eval_impulse(stable_material(0.5), math.pi) == pytest.approx(2.0, rel=1e-15)

    def test_maxwell(self):
        assert eval_impulse(maxwell(2, 4), 4.0) == 1.5

    def test_stable_normalisation(self):
        # scale t^a Gamma(1-a) sin(pi a)/(pi a) is the same curve
        a, c, t = 0.3, 1.7, 2.5
        expected = c * t**a * math.gamma(1 - a) * math.sin(math.pi * a) / (math.pi * a)
        assert eval_impulse(stable_material(a, c), t) == pytest.approx(expected, rel=1e-13)

    def test_vectorised(self):
        t = np.array([0.0, 1.0, 2.0])
        np.testing.assert_allclose(eval_impulse(maxwell(1, 1), t), 1 + t)

    def test_negative_time(self):
        with pytest.raises(InvalidParameterError):
            eval_impulse(spring(1), -1e-9)

    def test_value_at_zero_is_L(self):
        m = Analytic(BernsteinRep(0.25, 1.0, LevyMeasure(((2.0, 1.0),), Stable(0.5, 1.0))))
        assert eval_impulse(m, 0.0) == 0.25


class TestDerivative:
    def test_dashpot(self):
        for t in (0.1, 1.0, 100.0):
            assert eval_derivative(dashpot(3), t) == 3

    def test_kelvin_voigt_at_origin(self):
        h = 1e-6
        fd = (eval_impulse(kelvin_voigt(1, 1), h) - eval_impulse(kelvin_voigt(1, 1), 0.0)) / h
        assert eval_derivative(kelvin_voigt(1, 1), 1e-300) == pytest.approx(1.0)
        assert fd == pytest.approx(1.0, rel=1e-5)

    def test_stable(self):
        assert eval_derivative(stable_material(0.5), 1.0) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-14)
        quad, _ = integrate.quad(lambda s: eval_derivative(stable_material(0.5), s), 0, 1)
        assert quad == pytest.approx(eval_impulse(stable_material(0.5), 1.0), rel=1e-8)

    def test_rejects_composed_and_nonpositive_t(self):
        with pytest.raises(UnsupportedRepresentationError):
            eval_derivative(compose(spring(1), dashpot(1)), 1.0)
        with pytest.raises(InvalidParameterError):
            eval_derivative(spring(1), 0.0)

    @given(prony_materials())
    def test_matches_centered_differences(self, m):
        for t in (0.1, 1.0, 10.0):
            h = 1e-4 * t
            fd = (eval_impulse(m, t + h) - eval_impulse(m, t - h)) / (2 * h)
            d = eval_derivative(m, t)
            assert abs(fd - d) <= 1e-6 * abs(d) + 1e-9

    @given(prony_materials())
    def test_completely_monotone_low_orders(self, m):
        t = np.linspace(0.01, 20, 400)
        d = eval_derivative(m, t)
        assert np.all(d >= 0)
        assert np.all(np.diff(d) <= 1e-12)


class TestLaplace:
    def test_spring(self):
        assert laplace_fprime(spring(4), 7.0) == 0.25

    def test_dashpot(self):
        assert laplace_fprime(dashpot(3), 2.0) == 1.5

    def test_stable(self):
        assert laplace_fprime(stable_material(0.5), 2.0) == pytest.approx(2**-0.5, rel=1e-15)

    def test_stable_against_quadrature(self):
        th = 2.0
        val, _ = integrate.quad(lambda t: math.exp(-th * t) * eval_derivative(stable_material(0.5), t), 0, np.inf)
        assert laplace_fprime(stable_material(0.5), th) == pytest.approx(val, rel=1e-7)

    def test_zero_material(self):
        with pytest.raises(ZeroMaterialError):
            laplace_fprime(Analytic(BernsteinRep()), 1.0)

    @given(prony_materials())
    def test_atoms_against_quadrature(self, m):
        th = 1.3
        val, _ = integrate.quad(
            lambda t: math.exp(-th * t) * eval_derivative(m, t), 0, 60, epsabs=1e-13, epsrel=1e-12, limit=200
        )
        expected = m.L + val + m.K * math.exp(-th * 60) / th
        assert laplace_fprime(m, th) == pytest.approx(expected, rel=1e-6)

    def test_complex_argument(self):
        m = kelvin_voigt(2, 1)
        th = 1 + 2j
        assert laplace_fprime(m, th) == pytest.approx(0.5 * 2 / (th + 2))

    def test_composed_matches_inner_when_outer_is_identity(self):
        m = series(kelvin_voigt(1, 2), spring(4))
        c = compose(dashpot(1), m)
        for th in (0.7, 2.0, 1 + 3j):
            assert laplace_fprime(c, th) == pytest.approx(laplace_fprime(m, th), rel=1e-8)

    def test_composed_power_law(self):
        # stable(1/2) o stable(1/2) is a multiple of t^(1/4)
        s = stable_material(0.5)
        k = (2 / math.sqrt(math.pi)) ** 1.5
        th = 2.0
        assert laplace_fprime(compose(s, s), th) == pytest.approx(k * math.gamma(1.25) * th**-0.25, rel=1e-8)


class TestCompose:
    @given(prony_materials())
    def test_identity_outer(self, m):
        t = np.linspace(0, 10, 51)
        np.testing.assert_array_equal(eval_impulse(compose(dashpot(1), m), t), eval_impulse(m, t))

    def test_nested_stable(self):
        s = stable_material(0.5)
        k = 1 / (0.5 * math.gamma(0.5))
        assert eval_impulse(compose(s, s), 1.0) == pytest.approx(k**0.5 * k, rel=1e-14)
        assert eval_impulse(compose(s, s), 1.0) == pytest.approx(1.198623, abs=1e-6)

    def test_bernstein_grid(self):
        s = stable_material(0.5)
        assert bernstein_check(compose(s, s), TimeGrid(0, 0.01, 1001)).passed
        assert bernstein_check(compose(maxwell(1, 2), kelvin_voigt(1, 3))).passed

    def test_symbolic(self):
        c = compose(spring(1), dashpot(2))
        assert isinstance(c, Composed)
        assert c.outer == spring(1)

    def test_zero_rejected(self):
        with pytest.raises(ZeroMaterialError):
            compose(Analytic(BernsteinRep()), spring(1))


class TestCanonicalize:
    def test_sorts(self):
        rep = canonicalize(BernsteinRep(0, 0, LevyMeasure(((2, 1), (1, 3)))))
        assert rep.levy.atoms == ((1, 3), (2, 1))

    def test_merges(self):
        rep = canonicalize(BernsteinRep(0, 0, LevyMeasure(((1, 1), (1, 2)))))
        assert rep.levy.atoms == ((1, 3),)

    def test_drops_zero_weights(self):
        rep = canonicalize(BernsteinRep(1, 0, LevyMeasure(((1, 0), (2, 5)))))
        assert rep.levy.atoms == ((2, 5),)

    def test_accepts_material(self):
        m = canonicalize(Analytic(BernsteinRep(0, 0, LevyMeasure(((2, 1), (1, 3))))))
        assert isinstance(m, Analytic)
        assert m.atoms == ((1, 3), (2, 1))

    @given(
        st.lists(
            st.tuples(st.sampled_from([0.5, 1.0, 2.0, 3.0]), st.floats(0, 5)), max_size=8
        )
    )
    def test_idempotent(self, atoms):
        once = canonicalize(BernsteinRep(1, 0, LevyMeasure(tuple(atoms))))
        assert canonicalize(once) == once
        rates = [r for r, _ in once.levy.atoms]
        assert rates == sorted(set(rates))

    @pytest.mark.parametrize(
        "atoms, stable",
        [(((1, -1),), None), (((-1, 1),), None), (((0, 1),), None), ((), Stable(1.0, 1.0)), ((), Stable(0.5, 0))],
    )
    def test_invalid(self, atoms, stable):
        with pytest.raises(InvalidParameterError):
            BernsteinRep(0, 0, LevyMeasure(atoms, stable))

    def test_negative_constants(self):
        with pytest.raises(InvalidParameterError):
            BernsteinRep(-1, 0)
        with pytest.raises(InvalidParameterError):
            BernsteinRep(0, -1)


class TestBernsteinProperty:
    @given(prony_materials())
    def test_grid_signs(self, m):
        assert bernstein_check(m, TimeGrid(0, 0.01, 10001)).passed

    @given(prony_reps(), st.floats(0.05, 0.95), st.floats(0.1, 5))
    def test_grid_signs_with_stable(self, rep, alpha, c):
        m = Analytic(BernsteinRep(rep.constant_L, rep.drift_K, LevyMeasure(rep.levy.atoms, Stable(alpha, c))))
        assert bernstein_check(m, TimeGrid(0, 0.01, 2001)).passed

    def test_detects_convex(self):
        class Convex(Composed):
            def _f(self, z):
                return np.asarray(z) ** 2

        assert not bernstein_check(Convex(spring(1), spring(1))).passed

    @given(prony_materials(), prony_materials())
    def test_series_evaluation_adds(self, m1, m2):
        t = np.linspace(0, 20, 41)
        s = eval_impulse(series(m1, m2), t)
        parts = eval_impulse(m1, t) + eval_impulse(m2, t)
        np.testing.assert_allclose(s, parts, rtol=8 * np.finfo(float).eps * 8, atol=0)

    def test_series_exact_with_fractions(self):
        m1 = Analytic(BernsteinRep(Fraction(1, 3), Fraction(2, 7), LevyMeasure(((Fraction(1), Fraction(1, 5)),))))
        m2 = Analytic(BernsteinRep(Fraction(1, 6), 0, LevyMeasure(((Fraction(2), Fraction(3, 5)),))))
        s = series(m1, m2)
        assert s.L == Fraction(1, 2)
        assert s.K == Fraction(2, 7)
        assert s.atoms == ((1, Fraction(1, 5)), (2, Fraction(3, 5)))
