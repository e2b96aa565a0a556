import math

import numpy as np
import pytest

from gravsweep_core import (
    EvaluationError,
    QuadConfig,
    ValidationError,
    integrate_semi_infinite,
    rk4_integrate,
    romberg,
)


def inv_square_shifted(x):
    """Integrand of the reference sweep: k -> (x + k)^-2."""

    def f(k):
        s = x + k
        return 1.0 / (s * s)

    return f


def closed_form(x):
    # antiderivative -1/(x+k) evaluated on [5, 20]
    return 1.0 / (x + 5.0) - 1.0 / (x + 20.0)


class TestRomberg:
    @pytest.mark.parametrize("x,expected", [(0.0, 0.15), (5.0, 0.06), (20.0, 0.015)])
    def test_reference_integral(self, x, expected):
        res = romberg(inv_square_shifted(x), 5.0, 20.0, QuadConfig(tol=1e-10))
        assert res.converged
        assert res.value == pytest.approx(closed_form(x), rel=1e-10)
        assert res.value == pytest.approx(expected, rel=1e-10)
        assert res.evaluations >= 3
        assert res.error_estimate >= 0.0

    def test_quadratic_exact_at_level_two(self):
        res = romberg(lambda k: k * k, 0.0, 1.0, QuadConfig())
        assert res.value == 1.0 / 3.0
        assert res.evaluations == 5  # endpoints plus levels 1 and 2
        assert res.converged

    def test_constant(self):
        res = romberg(lambda k: 1.0, 2.0, 7.0, QuadConfig())
        assert res.value == 5.0
        assert res.evaluations == 3

    def test_invalid_interval(self):
        with pytest.raises(ValidationError):
            romberg(lambda k: k, 1.0, 1.0, QuadConfig())
        with pytest.raises(ValidationError):
            romberg(lambda k: k, 2.0, 1.0, QuadConfig())

    def test_nonfinite_sample_reports_abscissa(self):
        def f(k):
            return math.inf if k == 3.0 else 1.0 / (k - 3.0)

        with pytest.raises(EvaluationError) as err:
            romberg(f, 2.0, 4.0, QuadConfig())
        assert err.value.where == 3.0

    def test_nonconvergence_is_flagged(self):
        res = romberg(math.exp, 0.0, 1.0, QuadConfig(tol=1e-30, max_levels=5))
        assert not res.converged
        assert res.value == pytest.approx(math.e - 1.0, rel=1e-8)

    def test_linearity_at_fixed_depth(self):
        # Tiny tolerance pins the tableau depth, so the quadrature is a
        # fixed linear functional of the integrand.
        cfg = QuadConfig(tol=1e-30, max_levels=8)
        f = math.exp
        g = lambda k: 1.0 / (1.0 + k)
        alpha, beta = 2.5, -1.25
        combined = romberg(lambda k: alpha * f(k) + beta * g(k), 0.0, 1.0, cfg)
        parts = alpha * romberg(f, 0.0, 1.0, cfg).value + beta * romberg(
            g, 0.0, 1.0, cfg
        ).value
        assert combined.value == pytest.approx(parts, rel=1e-12)

    def test_interval_additivity(self):
        cfg = QuadConfig(tol=1e-10)
        whole = romberg(math.exp, 0.0, 2.0, cfg).value
        split = romberg(math.exp, 0.0, 1.0, cfg).value + romberg(
            math.exp, 1.0, 2.0, cfg
        ).value
        assert abs(whole - split) <= 2.0 * cfg.tol * max(1.0, abs(whole))

    @pytest.mark.parametrize("degree,levels", [(3, 2), (5, 3), (7, 4)])
    def test_polynomial_exactness(self, degree, levels):
        # The diagonal entry at level j is exact for degree <= 2j + 1.
        cfg = QuadConfig(tol=1e-300, max_levels=levels)
        res = romberg(lambda k: k**degree, 0.0, 1.0, cfg)
        assert res.value == pytest.approx(1.0 / (degree + 1), abs=5e-15)

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            QuadConfig(tol=0.0)
        with pytest.raises(ValidationError):
            QuadConfig(max_levels=1)
        with pytest.raises(ValidationError):
            QuadConfig(max_levels=31)


class TestSemiInfinite:
    def test_exponential(self):
        res = integrate_semi_infinite(lambda k: math.exp(-k), 0.0)
        assert res.converged
        assert res.value == pytest.approx(1.0, rel=1e-8)

    def test_inverse_square_from_zero(self):
        # Borderline ~1/k^2 decay: the transformed integrand has a jump at
        # u = 0, so convergence is slow and flagged; the value is still good.
        res = integrate_semi_infinite(
            lambda k: (1.0 + k) ** -2, 0.0, QuadConfig(tol=1e-8, max_levels=15)
        )
        assert not res.converged
        assert res.value == pytest.approx(1.0, abs=5e-5)

    def test_inverse_square_from_one(self):
        res = integrate_semi_infinite(
            lambda k: (1.0 + k) ** -2, 1.0, QuadConfig(tol=1e-8, max_levels=15)
        )
        assert res.value == pytest.approx(0.5, abs=5e-5)

    def test_matches_finite_plus_tail(self):
        # Transform result agrees with romberg on [a, A] plus the analytic
        # tail 1/(1+A), within the (loose) tolerance it converged to.
        cfg = QuadConfig(tol=1e-4, max_levels=18)
        a, cut = 0.0, 7.0
        full = integrate_semi_infinite(lambda k: (1.0 + k) ** -2, a, cfg)
        head = romberg(lambda k: (1.0 + k) ** -2, a, cut, QuadConfig(tol=1e-12))
        tail = 1.0 / (1.0 + cut)
        assert full.value == pytest.approx(head.value + tail, abs=2e-4)


class TestRk4:
    def test_exponential_growth(self):
        y = rk4_integrate(lambda t, y: y, 0.0, 1.0, 1.0, steps=100)
        assert y == pytest.approx(math.e, rel=1e-8)

    def test_constant_solution(self):
        assert rk4_integrate(lambda t, y: 0.0, -2.0, 5.0, 3.5, steps=7) == 3.5

    def test_linear_in_time_exact(self):
        assert rk4_integrate(lambda t, y: 1.0, 0.0, 3.0, 0.0, steps=1) == 3.0

    def test_fourth_order_convergence(self):
        def err(steps):
            return abs(rk4_integrate(lambda t, y: y, 0.0, 1.0, 1.0, steps) - math.e)

        ratio = err(100) / err(200)
        assert 16.0 * 0.8 <= ratio <= 16.0 * 1.2

    def test_vector_state(self):
        # Harmonic oscillator: state (y, y'), solution cos(t).
        def deriv(t, s):
            return np.array([s[1], -s[0]])

        out = rk4_integrate(deriv, 0.0, 1.0, np.array([1.0, 0.0]), steps=200)
        assert out[0] == pytest.approx(math.cos(1.0), rel=1e-9)

    def test_backward_integration(self):
        y = rk4_integrate(lambda t, y: y, 1.0, 0.0, math.e, steps=100)
        assert y == pytest.approx(1.0, rel=1e-8)

    def test_nonfinite_derivative_reports_time(self):
        def deriv(t, y):
            return float("nan") if t > 0.4 else y

        with pytest.raises(EvaluationError) as err:
            rk4_integrate(deriv, 0.0, 1.0, 1.0, steps=10)
        assert err.value.where is not None

    def test_steps_validation(self):
        with pytest.raises(ValidationError):
            rk4_integrate(lambda t, y: y, 0.0, 1.0, 1.0, steps=0)
