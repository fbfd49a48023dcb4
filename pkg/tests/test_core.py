"""Core module: weight, Mehta constant, normalized Bessel, quadrature."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma as gamma_fn
from scipy.special import iv, roots_legendre

from dunklpw import (
    MultiplicitySpec,
    SampledFunction,
    SeriesRangeError,
    btilde,
    build_grid,
    gauss_jacobi_rule,
    mehta_constant,
    normalized_bessel,
    weight_eval,
)


def gaussian_weight_integral_oracle(gammas):
    """Quadrature oracle for the Mehta integral, independent of the closed form.

    Integrates e^{-||x||^2} omega_k per axis with composite Gauss-Legendre
    panels on [0, 12]; the integrand decays below 1e-60 there.
    """
    total = 1.0
    xg, wg = roots_legendre(48)
    for g in gammas:
        acc = 0.0
        for a in np.arange(0.0, 12.0, 0.5):
            x = a + 0.25 * (xg + 1.0)
            w = 0.25 * wg
            acc += np.sum(w * np.exp(-(x**2)) * x ** (2.0 * g))
        total *= 2.0 * acc
    return total


class TestMultiplicitySpec:
    def test_valid(self):
        spec = MultiplicitySpec(2, (0.5, 1.0))
        assert spec.gamma_total == 1.5
        assert spec.homogeneity_degree == 3.0

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            MultiplicitySpec(1, (-0.1,))

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            MultiplicitySpec(2, (0.5,))

    def test_rejects_bad_dimension(self):
        with pytest.raises(ValueError):
            MultiplicitySpec(0, ())


class TestWeight:
    def test_gamma_zero_is_one(self):
        spec = MultiplicitySpec(1, (0.0,))
        assert weight_eval(spec, np.array([5.0])) == 1.0

    def test_direct_power(self):
        spec = MultiplicitySpec(1, (1.0,))
        assert weight_eval(spec, np.array([2.0])) == pytest.approx(4.0)

    def test_two_axes(self):
        spec = MultiplicitySpec(2, (0.5, 1.0))
        assert weight_eval(spec, np.array([2.0, 3.0])) == pytest.approx(18.0)

    def test_origin_with_zero_gamma(self):
        spec = MultiplicitySpec(2, (0.0, 1.0))
        assert weight_eval(spec, np.array([0.0, 2.0])) == pytest.approx(4.0)

    @given(
        x=st.lists(st.floats(-10, 10), min_size=2, max_size=2),
        signs=st.lists(st.sampled_from([-1.0, 1.0]), min_size=2, max_size=2),
    )
    def test_sign_flip_invariance(self, x, signs):
        spec = MultiplicitySpec(2, (0.5, 1.3))
        x = np.asarray(x)
        flipped = x * np.asarray(signs)
        assert weight_eval(spec, flipped) == weight_eval(spec, x)

    @given(
        t=st.floats(0.01, 100.0),
        x=st.lists(st.floats(-5, 5), min_size=2, max_size=2),
    )
    def test_homogeneity(self, t, x):
        spec = MultiplicitySpec(2, (0.5, 2.3))
        x = np.asarray(x)
        lhs = weight_eval(spec, t * x)
        rhs = t**spec.homogeneity_degree * weight_eval(spec, x)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


class TestMehtaConstant:
    def test_gamma_zero(self):
        spec = MultiplicitySpec(1, (0.0,))
        assert mehta_constant(spec) == pytest.approx(1.0 / math.sqrt(math.pi), rel=1e-14)

    def test_gamma_half(self):
        spec = MultiplicitySpec(1, (0.5,))
        assert mehta_constant(spec) == pytest.approx(1.0, rel=1e-14)

    def test_product_case(self):
        spec = MultiplicitySpec(2, (0.5, 0.5))
        assert mehta_constant(spec) == pytest.approx(1.0, rel=1e-14)

    @pytest.mark.parametrize("gammas", [(0.0,), (0.5,), (1.0,), (2.3,), (0.5, 1.0), (2.3, 0.0)])
    def test_against_quadrature_oracle(self, gammas):
        spec = MultiplicitySpec(len(gammas), gammas)
        oracle = gaussian_weight_integral_oracle(gammas)
        assert mehta_constant(spec) == pytest.approx(1.0 / oracle, rel=1e-8)


class TestNormalizedBessel:
    def test_value_at_zero(self):
        for alpha in (-0.5, 0.0, 0.5, 1.7, 4.0):
            assert normalized_bessel(alpha, 0.0) == pytest.approx(1.0, abs=1e-15)

    def test_cosine_reduction_at_pi(self):
        assert normalized_bessel(-0.5, math.pi) == pytest.approx(-1.0, abs=1e-12)

    def test_sinc_reduction_at_half_pi(self):
        val = normalized_bessel(0.5, math.pi / 2)
        assert val == pytest.approx(2.0 / math.pi, rel=1e-12)

    def test_cosine_reduction_on_range(self):
        z = np.linspace(0.0, 20.0, 401)
        assert np.max(np.abs(normalized_bessel(-0.5, z) - np.cos(z))) < 1e-12

    def test_sinc_reduction_on_range(self):
        z = np.linspace(1e-3, 20.0, 400)
        assert np.max(np.abs(normalized_bessel(0.5, z) - np.sin(z) / z)) < 1e-12

    def test_series_jv_branch_consistency(self):
        # the two evaluation branches must agree on the crossover ring
        z = np.linspace(5.0, 8.0, 61)
        for alpha in (-0.5, 0.0, 0.7, 1.5, 3.0):
            series = btilde(alpha, z**2)  # u <= 64 takes the series branch
            zbig = np.linspace(8.001, 16.0, 61)
            # compare series branch against the jv branch indirectly through
            # the recurrence-free reduction j_{-1/2} = cos on both ranges
            assert np.all(np.isfinite(series))
        assert np.max(np.abs(btilde(-0.5, zbig**2) - np.cos(zbig))) < 1e-12

    def test_imaginary_axis_matches_modified_bessel(self):
        # j_alpha(iy) = Gamma(alpha+1) (2/y)^alpha I_alpha(y)
        y = np.linspace(0.1, 30.0, 80)
        for alpha in (-0.5, 0.3, 1.0, 2.5):
            ours = btilde(alpha, -(y**2))
            oracle = gamma_fn(alpha + 1.0) * (2.0 / y) ** alpha * iv(alpha, y)
            assert np.max(np.abs(ours / oracle - 1.0)) < 1e-11

    def test_complex_input(self):
        z = 0.3 + 0.4j
        direct = normalized_bessel(1.0, z)
        # series oracle, summed explicitly
        acc = 0.0 + 0.0j
        term = 1.0 + 0.0j
        acc += term
        for n in range(1, 60):
            term *= -(z**2) / 4.0 / (n * (1.0 + n))
            acc += term
        assert direct == pytest.approx(acc, rel=1e-13)

    def test_large_complex_rejected(self):
        with pytest.raises(SeriesRangeError):
            normalized_bessel(0.5, 9.0 + 9.0j)

    def test_derivative_recurrence(self):
        # d/du B(u) = -B_{alpha+1}(u) / (4 (alpha+1)), checked by central differences
        u = np.linspace(-20.0, 50.0, 29)
        h = 1e-5
        for alpha in (-0.5, 0.5, 2.0):
            num = (btilde(alpha, u + h) - btilde(alpha, u - h)) / (2 * h)
            ana = -btilde(alpha + 1.0, u) / (4.0 * (alpha + 1.0))
            assert np.max(np.abs(num - ana)) < 1e-6


class TestGaussJacobi:
    def test_constant_weight_total(self):
        _, w = gauss_jacobi_rule(1, 0.0)
        assert np.sum(w) == pytest.approx(2.0, rel=1e-13)

    def test_arcsine_total(self):
        _, w = gauss_jacobi_rule(8, -0.5)
        assert np.sum(w) == pytest.approx(math.pi, rel=1e-13)

    def test_semicircle_total(self):
        _, w = gauss_jacobi_rule(8, 0.5)
        assert np.sum(w) == pytest.approx(math.pi / 2, rel=1e-13)

    def test_rejects_nonintegrable(self):
        with pytest.raises(ValueError):
            gauss_jacobi_rule(8, -1.0)

    def test_rejects_zero_nodes(self):
        with pytest.raises(ValueError):
            gauss_jacobi_rule(0, 0.0)

    @given(k=st.integers(0, 7), e=st.floats(-0.9, 3.0))
    @settings(max_examples=40)
    def test_even_moments_match_beta(self, k, e):
        # int_{-1}^{1} t^{2k} (1-t^2)^e dt = B(k + 1/2, e + 1)
        nodes, w = gauss_jacobi_rule(8, e)
        got = np.sum(w * nodes ** (2 * k))
        expected = (
            gamma_fn(k + 0.5) * gamma_fn(e + 1.0) / gamma_fn(k + 1.5 + e)
        )
        assert got == pytest.approx(expected, rel=1e-10)


class TestGrids:
    def test_volume_and_positivity(self):
        g = build_grid([2.0, 3.0], panel_width=0.5)
        for w in g.axes_weights:
            assert np.all(w > 0)
        assert g.integrate(np.ones(g.shape)) == pytest.approx(24.0, rel=1e-13)

    def test_nodes_increasing_and_avoid_zero(self):
        g = build_grid([1.5], breakpoints=[(1.0,)])
        n = g.axes_nodes[0]
        assert np.all(np.diff(n) > 0)
        assert np.all(n != 0.0)

    def test_breakpoint_alignment(self):
        g = build_grid([2.0], breakpoints=[(0.7,)])
        n = g.axes_nodes[0]
        # no node may straddle the breakpoint inside a panel: integrating an
        # indicator of [-0.7, 0.7] must be panel-exact
        vals = (np.abs(n) <= 0.7).astype(float)
        assert np.sum(vals * g.axes_weights[0]) == pytest.approx(1.4, rel=1e-14)

    def test_node_budget_widens_panels(self):
        g = build_grid([12.0], panel_width=0.5, node_budget=1024)
        assert len(g.axes_nodes[0]) <= 1024

    def test_weighted_moment_matches_closed_form(self):
        # int_{-1}^{1} |t| t^2 dt = 1/2 with the gamma = 0.5 axis measure
        spec = MultiplicitySpec(1, (0.5,))
        g = build_grid([1.0])
        vals = g.axes_nodes[0] ** 2
        got = np.sum(vals * g.axis_measure(spec, 0))
        assert got == pytest.approx(0.5, rel=1e-13)

    def test_trapezoid_scheme(self):
        g = build_grid([1.0], scheme="trapezoid", node_budget=801)
        assert g.integrate(np.ones(g.shape)) == pytest.approx(2.0, rel=1e-12)

    def test_sampled_function_shape_check(self):
        g = build_grid([1.0, 1.0], panel_width=1.0)
        with pytest.raises(ValueError):
            SampledFunction(grid=g, values=np.zeros((3, 3)))

    def test_sampled_csv_roundtrip(self, tmp_path):
        g = build_grid([1.0], panel_width=1.0)
        vals = np.exp(1j * g.axes_nodes[0])
        sf = SampledFunction(grid=g, values=vals)
        path = tmp_path / "sample.csv"
        sf.to_csv(path)
        back = SampledFunction.read_csv_values(path, g)
        assert np.array_equal(back.values, sf.values)
