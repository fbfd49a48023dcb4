"""Kernel values, bounds, invariances, and the eigen-relation residual."""

import math

import numpy as np
import pytest
from scipy.special import jv

from dunklpw.core import MultiplicitySpec
from dunklpw.kernel import (
    KernelEvaluator,
    kernel_1d,
    kernel_as_expr,
    kernel_eigen_residual,
    kernel_nd,
)

SPECS = [
    MultiplicitySpec(d=1, gammas=(0.0,)),
    MultiplicitySpec(d=1, gammas=(0.5,)),
    MultiplicitySpec(d=1, gammas=(2.3,)),
    MultiplicitySpec(d=2, gammas=(0.5, 1.0)),
]


class TestKernel1d:
    @pytest.mark.parametrize("gamma", [0.0, 0.5, 1.7])
    @pytest.mark.parametrize("z", [0.3, 2.0 + 1.0j, -4.0])
    def test_value_at_zero(self, gamma, z):
        assert abs(kernel_1d(gamma, z, 0.0) - 1.0) < 1e-15

    def test_gamma_zero_is_exponential(self):
        # cosh + sinh oracle
        want = math.cosh(1.0) + math.sinh(1.0)
        assert abs(kernel_1d(0.0, 1.0, 1.0) - want) < 1e-14
        z = np.array([0.5, -1.2, 3.0])
        np.testing.assert_allclose(
            kernel_1d(0.0, z, 2.0).real, np.exp(2.0 * z), rtol=1e-13
        )

    def test_imaginary_argument_bessel_oracle(self):
        # K(i, 1) at gamma=1/2 is J0(1) + i J1(1)
        got = complex(kernel_1d(0.5, 1j, 1.0))
        want = complex(jv(0, 1.0), jv(1, 1.0))
        assert abs(got - want) < 1e-12
        assert abs(got - (0.765198 + 0.440051j)) < 1e-6
        assert abs(got) <= 1.0

    def test_negative_gamma_rejected(self):
        with pytest.raises(ValueError):
            kernel_1d(-0.5, 1.0, 1.0)


class TestKernelNd:
    def test_gamma_zero_product_exponential(self):
        spec = MultiplicitySpec(d=2, gammas=(0.0, 0.0))
        rng = np.random.default_rng(5)
        z = rng.uniform(-2, 2, size=(10, 2))
        w = rng.uniform(-2, 2, size=(10, 2))
        got = kernel_nd(spec, z, w)
        want = np.exp(np.sum(z * w, axis=-1))
        np.testing.assert_allclose(got.real, want, rtol=1e-12)
        np.testing.assert_allclose(got.imag, 0.0, atol=1e-12)

    def test_lambda_shift(self):
        # K(lambda z, w) = K(z, lambda w) for complex lambda
        spec = MultiplicitySpec(d=2, gammas=(0.5, 1.0))
        rng = np.random.default_rng(9)
        for _ in range(5):
            z = rng.uniform(-1, 1, size=2) + 1j * rng.uniform(-1, 1, size=2)
            w = rng.uniform(-1, 1, size=2) + 1j * rng.uniform(-1, 1, size=2)
            lam = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
            a = kernel_nd(spec, lam * z, w)
            b = kernel_nd(spec, z, lam * w)
            assert abs(a - b) < 1e-10 * max(1.0, abs(a))

    def test_sign_flip_invariance(self):
        spec = MultiplicitySpec(d=2, gammas=(0.5, 1.0))
        rng = np.random.default_rng(3)
        x = rng.uniform(-3, 3, size=(8, 2))
        y = rng.uniform(-3, 3, size=(8, 2))
        base = kernel_nd(spec, x, y)
        for flips in [(-1, 1), (1, -1), (-1, -1)]:
            g = np.array(flips, dtype=float)
            np.testing.assert_allclose(
                kernel_nd(spec, x * g, y * g), base, rtol=1e-12
            )

    def test_symmetry(self):
        ev = KernelEvaluator(spec=MultiplicitySpec(d=2, gammas=(0.5, 1.0)))
        rng = np.random.default_rng(12)
        z = rng.uniform(-2, 2, size=(6, 2)).astype(complex)
        w = rng.uniform(-2, 2, size=(6, 2)).astype(complex)
        np.testing.assert_allclose(
            ev.evaluate(z, w), ev.evaluate(w, z), rtol=1e-12
        )

    def test_evaluator_tolerance_validation(self):
        with pytest.raises(ValueError):
            KernelEvaluator(spec=SPECS[0], tolerance=1e-3)


class TestBounds:
    @pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"g{s.gammas}")
    def test_imaginary_first_slot_bounded(self, spec):
        rng = np.random.default_rng(42)
        n = 10_000
        x = rng.uniform(-5, 5, size=(n, spec.d))
        y = rng.uniform(-5, 5, size=(n, spec.d))
        vals = kernel_nd(spec, 1j * x, y)
        assert np.max(np.abs(vals)) <= 1.0 + 1e-10

    def test_conjugation(self):
        spec = MultiplicitySpec(d=2, gammas=(0.5, 1.0))
        rng = np.random.default_rng(8)
        x = rng.uniform(-4, 4, size=(50, 2))
        y = rng.uniform(-4, 4, size=(50, 2))
        a = kernel_nd(spec, -1j * x, y)
        b = np.conjugate(kernel_nd(spec, 1j * x, y))
        np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)

    @pytest.mark.parametrize("spec", SPECS, ids=lambda s: f"g{s.gammas}")
    def test_laplace_sandwich_real_arguments(self, spec):
        rng = np.random.default_rng(17)
        x = rng.uniform(-3, 3, size=(200, spec.d))
        z = rng.uniform(-3, 3, size=(200, spec.d))
        vals = kernel_nd(spec, x, z)
        np.testing.assert_allclose(vals.imag, 0.0, atol=1e-12)
        xnorm = np.linalg.norm(x, axis=-1)
        znorm = np.linalg.norm(z, axis=-1)
        hi = np.exp(xnorm * znorm)
        lo = np.exp(-xnorm * znorm)
        assert np.all(vals.real <= hi * (1 + 1e-10))
        assert np.all(vals.real >= lo * (1 - 1e-10))

    def test_derivative_bound(self):
        # |d_z^nu K(x, z)| <= ||x||^{|nu|} e^{||x|| ||Re z||} for |nu| <= 2,
        # checked with exact expression derivatives at real z
        spec = MultiplicitySpec(d=2, gammas=(0.5, 1.0))
        rng = np.random.default_rng(23)
        for _ in range(10):
            x = rng.uniform(-2, 2, size=2)
            expr = kernel_as_expr(spec, x)  # K(z, x) = K(x, z) in variable z
            z = rng.uniform(-2, 2, size=(5, 2))
            bound_base = np.linalg.norm(x) * np.linalg.norm(z, axis=-1)
            for nu in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]:
                dexpr = expr
                for j, m in enumerate(nu):
                    for _ in range(m):
                        dexpr = dexpr.partial(j)
                vals = np.abs(dexpr.evaluate(z))
                bound = np.linalg.norm(x) ** sum(nu) * np.exp(bound_base)
                assert np.all(vals <= bound * (1 + 1e-9))


class TestEigenRelation:
    def test_1d_half(self):
        spec = MultiplicitySpec(d=1, gammas=(0.5,))
        res = kernel_eigen_residual(spec, 0, np.array([0.7]), np.array([1.3]))
        assert res < 1e-8

    def test_gamma_zero_exponential(self):
        spec = MultiplicitySpec(d=1, gammas=(0.0,))
        rng = np.random.default_rng(2)
        for _ in range(5):
            x = rng.uniform(-2, 2, size=1)
            y = rng.uniform(-2, 2, size=1)
            assert kernel_eigen_residual(spec, 0, x, y) < 1e-12

    def test_2d_random(self):
        spec = MultiplicitySpec(d=2, gammas=(0.5, 1.0))
        rng = np.random.default_rng(31)
        for _ in range(5):
            x = rng.uniform(-2, 2, size=2)
            y = rng.uniform(-2, 2, size=2)
            for j in range(2):
                assert kernel_eigen_residual(spec, j, x, y) < 1e-7

    def test_expr_matches_direct_evaluation(self):
        # the closed-form expression and the numeric kernel agree
        spec = MultiplicitySpec(d=2, gammas=(0.5, 1.0))
        y = np.array([1.2, -0.7])
        expr = kernel_as_expr(spec, y)
        rng = np.random.default_rng(4)
        x = rng.uniform(-2, 2, size=(20, 2))
        np.testing.assert_allclose(
            expr.evaluate(x),
            kernel_nd(spec, x.astype(complex), np.broadcast_to(y, x.shape)),
            rtol=1e-12,
        )

    def test_zero_component_drops_out(self):
        spec = MultiplicitySpec(d=2, gammas=(0.5, 1.0))
        expr = kernel_as_expr(spec, np.array([1.0, 0.0]))
        x = np.array([[0.5, 2.0], [1.0, -3.0]])
        one_d = kernel_as_expr(MultiplicitySpec(d=1, gammas=(0.5,)), np.array([1.0]))
        np.testing.assert_allclose(
            expr.evaluate(x), one_d.evaluate(x[:, :1]), rtol=1e-13
        )
