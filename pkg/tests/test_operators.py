"""Differential-difference operators: values, composition, anti-symmetry."""

import numpy as np
import pytest

from dunklpw.core import MultiplicitySpec, build_grid
from dunklpw.expr import FunctionExpr, from_text
from dunklpw.kernel import kernel_as_expr
from dunklpw.operators import (
    MAX_OPERATOR_DEPTH,
    OperatorResult,
    PolynomialSpec,
    dunkl_apply,
    dunkl_laplacian,
    poly_iT_apply,
)


def spec1(gamma):
    return MultiplicitySpec(d=1, gammas=(gamma,))


class TestDunklApply:
    def test_even_monomial(self):
        # T(x^2) = 2x: the difference term vanishes on even functions
        x = FunctionExpr.coordinate(1, 0)
        out = dunkl_apply(spec1(0.8), 0, x**2)
        pts = np.array([0.0, 1.5, -2.0])
        np.testing.assert_allclose(out.evaluate(pts).real, 2 * pts, atol=1e-15)

    @pytest.mark.parametrize("gamma", [0.0, 0.5, 1.3])
    def test_coordinate(self, gamma):
        # T(x) = 1 + 2*gamma, a constant
        x = FunctionExpr.coordinate(1, 0)
        out = dunkl_apply(spec1(gamma), 0, x)
        assert out.is_constant
        assert abs(out.constant_value().real - (1 + 2 * gamma)) < 1e-15

    def test_gamma_zero_is_plain_derivative(self):
        f = from_text("side=space; d=1; body=x^3*gaussian(0.7)")
        out = dunkl_apply(spec1(0.0), 0, f)
        want = f.partial(0)
        pts = np.linspace(-2, 2, 9)
        np.testing.assert_allclose(out.evaluate(pts), want.evaluate(pts), rtol=1e-14)

    def test_kernel_eigen_value(self):
        spec = spec1(0.5)
        y = np.array([1.3])
        K = kernel_as_expr(spec, y)
        TK = dunkl_apply(spec, 0, K)
        pts = np.linspace(-2, 2, 21)[:, None]
        resid = TK.evaluate(pts) - 1.3 * K.evaluate(pts)
        assert np.max(np.abs(resid)) < 1e-8

    def test_finite_at_origin(self):
        # the exact quotient leaves no singularity on the hyperplane
        f = from_text("side=space; d=1; body=x^3 + x*gaussian(1.0)")
        out = dunkl_apply(spec1(0.9), 0, f)
        val = out.evaluate(np.array([0.0]))
        assert np.isfinite(val).all()

    def test_parity_swap(self):
        spec = spec1(0.6)
        x = FunctionExpr.coordinate(1, 0)
        even = (x**2) * FunctionExpr.gaussian(1, 1.0)
        odd = (x**3) * FunctionExpr.gaussian(1, 1.0)
        assert dunkl_apply(spec, 0, even).parity_in(0) == "odd"
        assert dunkl_apply(spec, 0, odd).parity_in(0) == "even"

    def test_indicator_rejected(self):
        with pytest.raises(ValueError):
            dunkl_apply(spec1(0.5), 0, FunctionExpr.indicator_ball(1, 1.0, side="space"))

    def test_frequency_side_rejected(self):
        f = FunctionExpr.gaussian(1, 1.0, side="frequency")
        with pytest.raises(ValueError, match="space-side"):
            dunkl_apply(spec1(0.5), 0, f)

    def test_odd_exp_argument_rejected(self):
        # exp(x) is not even in x, so the difference does not divide exactly
        f = from_text("side=space; d=1; body=exp(x)")
        with pytest.raises(ValueError, match="divide exactly"):
            dunkl_apply(spec1(0.5), 0, f)

    def test_anti_symmetry_quadrature(self):
        # integral of (T f) g w_k = -integral of f (T g) w_k
        spec = spec1(0.7)
        f = from_text("side=space; d=1; body=x*gaussian(1.0)")
        g = from_text("side=space; d=1; body=gaussian(2.0) + x^2*gaussian(1.5)")
        tf = dunkl_apply(spec, 0, f)
        tg = dunkl_apply(spec, 0, g)
        grid = build_grid((8.0,))
        pts = grid.points()
        lhs = grid.integrate(tf.evaluate(pts) * g.evaluate(pts), spec=spec)
        rhs = grid.integrate(f.evaluate(pts) * tg.evaluate(pts), spec=spec)
        assert abs(lhs + rhs) < 1e-6 * max(1.0, abs(lhs))


class TestLaplacian:
    @pytest.mark.parametrize("gamma", [0.0, 0.5, 1.3])
    def test_square(self, gamma):
        x = FunctionExpr.coordinate(1, 0)
        out = dunkl_laplacian(spec1(gamma), x**2)
        assert out.is_constant
        assert abs(out.constant_value().real - 2 * (1 + 2 * gamma)) < 1e-14

    def test_classical_sine(self):
        # sin x = x * B_{1/2}(x^2); at gamma=0 the Laplacian is the second
        # derivative, giving -sin x
        f = from_text("side=space; d=1; body=x*bessel(0.5, x^2)")
        out = dunkl_laplacian(spec1(0.0), f)
        pts = np.linspace(-3, 3, 25)
        np.testing.assert_allclose(
            out.evaluate(pts).real, -np.sin(pts), rtol=0, atol=1e-12
        )

    def test_2d_sum_of_axes(self):
        spec = MultiplicitySpec(d=2, gammas=(0.5, 1.0))
        f = FunctionExpr.gaussian(2, 1.0)
        total = dunkl_laplacian(spec, f)
        parts = sum(
            (
                dunkl_apply(spec, j, dunkl_apply(spec, j, f))
                for j in range(2)
            ),
            FunctionExpr.zero(2),
        )
        pts = np.random.default_rng(1).uniform(-2, 2, size=(15, 2))
        np.testing.assert_allclose(total.evaluate(pts), parts.evaluate(pts), rtol=1e-14)

    def test_gaussian_explicit_form(self):
        # for f = e^{-x^2} in d=1: T^2 f = (4x^2 - 2 - 4*gamma) e^{-x^2}
        gamma = 0.8
        f = FunctionExpr.gaussian(1, 1.0)
        out = dunkl_laplacian(spec1(gamma), f)
        pts = np.linspace(-2, 2, 11)
        want = (4 * pts**2 - 2 - 4 * gamma) * np.exp(-(pts**2))
        np.testing.assert_allclose(out.evaluate(pts).real, want, rtol=0, atol=1e-12)


class TestPolynomialSpec:
    def test_constant_rejected(self):
        with pytest.raises(ValueError, match="non-constant"):
            PolynomialSpec((((0,), 2.0),))

    def test_degree_and_eval(self):
        P = PolynomialSpec.from_dict({(2, 0): 1.0, (0, 1): -3.0})
        assert P.degree == 2
        assert P.d == 2
        assert P.evaluate([2.0, 1.0]) == 1.0 * 4.0 - 3.0

    def test_negative_normsq(self):
        P = PolynomialSpec.negative_normsq(2)
        assert P.evaluate([1.0, 2.0]) == -5.0

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(ValueError):
            PolynomialSpec((((1,), 1.0), ((1, 0), 1.0)))


class TestPolyIT:
    def test_negative_normsq_is_laplacian(self):
        spec = MultiplicitySpec(d=2, gammas=(0.5, 1.0))
        f = from_text("side=space; d=2; body=gaussian(1.0)*x1^2")
        res = poly_iT_apply(spec, PolynomialSpec.negative_normsq(2), f, n=1)
        want = dunkl_laplacian(spec, f)
        pts = np.random.default_rng(6).uniform(-2, 2, size=(20, 2))
        np.testing.assert_allclose(
            res.expr.evaluate(pts), want.evaluate(pts), rtol=0, atol=1e-12
        )
        assert "realified" in res.log

    def test_squared_application_sign(self):
        # P(y) = y_1 twice: (iT)^2 = -T^2
        spec = spec1(0.5)
        f = FunctionExpr.gaussian(1, 1.0)
        P = PolynomialSpec.from_dict({(1,): 1.0})
        res = poly_iT_apply(spec, P, f, n=2)
        t2 = dunkl_apply(spec, 0, dunkl_apply(spec, 0, f))
        pts = np.linspace(-2, 2, 9)
        np.testing.assert_allclose(
            res.expr.evaluate(pts), -t2.evaluate(pts), rtol=0, atol=1e-13
        )

    def test_eigenfunction_oracle(self):
        # f = K(., y0) satisfies P(iT) f = P(i y0) f
        spec = spec1(0.5)
        y0 = np.array([1.1])
        K = kernel_as_expr(spec, y0)
        P = PolynomialSpec.from_dict({(2,): 1.0})
        res = poly_iT_apply(spec, P, K, n=1)
        pts = np.linspace(-1.5, 1.5, 15)[:, None]
        want = P.evaluate(1j * y0) * K.evaluate(pts)
        got = res.expr.evaluate(pts)
        assert np.max(np.abs(got - want)) < 1e-7

    def test_complex_retained_for_odd_degree(self):
        spec = spec1(0.5)
        f = FunctionExpr.gaussian(1, 1.0)
        P = PolynomialSpec.from_dict({(1,): 1.0})
        res = poly_iT_apply(spec, P, f, n=1)
        assert "complex_retained" in res.log
        vals = res.expr.evaluate(np.array([0.7, 1.4]))
        assert np.max(np.abs(vals.real)) < 1e-14  # i * (odd real function)

    def test_depth_cap(self):
        spec = spec1(0.5)
        f = FunctionExpr.gaussian(1, 1.0)
        P = PolynomialSpec.from_dict({(2,): -1.0})
        with pytest.raises(ValueError, match="multiplier route"):
            poly_iT_apply(spec, P, f, n=MAX_OPERATOR_DEPTH // 2 + 1)

    def test_result_finite_on_grid(self):
        spec = MultiplicitySpec(d=2, gammas=(0.5, 1.0))
        f = FunctionExpr.gaussian(2, 0.5)
        res = poly_iT_apply(spec, PolynomialSpec.negative_normsq(2), f, n=2)
        grid = build_grid((3.0, 3.0))
        vals = res.expr.evaluate(grid.points())
        assert np.all(np.isfinite(vals))
        assert isinstance(res, OperatorResult)
