"""The reflection-invariant integral kernel for sign-flip symmetry groups.

In one dimension with multiplicity gamma >= 0,

    K(z, w) = j_{gamma-1/2}(izw) + (zw / (2 gamma + 1)) * j_{gamma+1/2}(izw),

which degenerates to e^{zw} at gamma = 0.  On R^d with one multiplicity per
axis the kernel is the product of the one-dimensional factors, since each
reflection acts on a single coordinate.  Writing j_a(z) = B_a(z^2) in the
even-argument form turns the factor into

    K(x, y) = B_{g-1/2}(-y^2 x^2) + (y / (2g+1)) * x * B_{g+1/2}(-y^2 x^2),

a grammar expression in x for fixed y, which is what the operator module
differentiates exactly for the eigen-relation T_j K(., y) = y_j K(., y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MultiplicitySpec, btilde, normalized_bessel
from .expr import FunctionExpr
from .operators import dunkl_apply

__all__ = [
    "kernel_1d",
    "kernel_nd",
    "kernel_as_expr",
    "kernel_multiplier_expr",
    "kernel_eigen_residual",
    "KernelEvaluator",
]


def kernel_1d(gamma: float, z, w) -> np.ndarray:
    """One-dimensional kernel K(z, w); broadcasts over array arguments."""
    gamma = float(gamma)
    if gamma < 0:
        raise ValueError(f"multiplicity must be nonnegative, got {gamma}")
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    s = z * w
    u = -(s * s)  # (izw)^2
    alpha = gamma - 0.5
    if np.allclose(u.imag, 0.0, atol=1e-14 * max(1.0, float(np.max(np.abs(u)) or 1.0))):
        ur = u.real
        first = btilde(alpha, ur).astype(complex)
        second = btilde(alpha + 1.0, ur).astype(complex)
    else:
        first = normalized_bessel(alpha, 1j * s)
        second = normalized_bessel(alpha + 1.0, 1j * s)
    out = first + s / (2.0 * gamma + 1.0) * second
    return out


def kernel_nd(spec: MultiplicitySpec, z, w) -> np.ndarray:
    """Product kernel on R^d; z, w have trailing dimension d."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if z.shape[-1:] != (spec.d,) or w.shape[-1:] != (spec.d,):
        raise ValueError(f"points must have trailing dimension {spec.d}")
    out = None
    for j, g in enumerate(spec.gammas):
        factor = kernel_1d(g, z[..., j], w[..., j])
        out = factor if out is None else out * factor
    return out


def kernel_as_expr(spec: MultiplicitySpec, y, side: str = "space") -> FunctionExpr:
    """K(., y) for a fixed real y, as a closed-form expression in x.

    Uses the even-argument Bessel form per axis; the zero components of y
    contribute the constant factor 1 and drop out of the product.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (spec.d,):
        raise ValueError(f"y must be a real point of shape ({spec.d},)")
    out = FunctionExpr.constant(spec.d, 1.0, side)
    for j, g in enumerate(spec.gammas):
        xj = FunctionExpr.coordinate(spec.d, j, side)
        arg = -float(y[j]) ** 2 * xj**2
        factor = FunctionExpr.bessel(g - 0.5, arg)
        factor = factor + (float(y[j]) / (2.0 * g + 1.0)) * xj * FunctionExpr.bessel(
            g + 0.5, arg
        )
        out = out * factor
    return out


def kernel_multiplier_expr(spec: MultiplicitySpec, y) -> FunctionExpr:
    """K(-i xi, y) for fixed real y, as a frequency-side expression in xi.

    This is the multiplier that turns translation by y into a product on
    the frequency side.  Per axis it reads

        B_{g-1/2}(y^2 xi^2) - i (y / (2g+1)) xi B_{g+1/2}(y^2 xi^2),

    with complex coefficients carried by the expression algebra.
    """
    y = np.asarray(y, dtype=float)
    if y.shape != (spec.d,):
        raise ValueError(f"y must be a real point of shape ({spec.d},)")
    out = FunctionExpr.constant(spec.d, 1.0, "frequency")
    for j, g in enumerate(spec.gammas):
        xj = FunctionExpr.coordinate(spec.d, j, "frequency")
        arg = float(y[j]) ** 2 * xj**2
        factor = FunctionExpr.bessel(g - 0.5, arg)
        factor = factor + (-1j * float(y[j]) / (2.0 * g + 1.0)) * xj * FunctionExpr.bessel(
            g + 0.5, arg
        )
        out = out * factor
    return out


def kernel_eigen_residual(spec: MultiplicitySpec, j: int, x, y) -> float:
    """|T_j K(., y)(x) - y_j K(x, y)| with T_j applied in closed form."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    expr = kernel_as_expr(spec, y)
    tj = dunkl_apply(spec, j, expr)
    lhs = tj.evaluate(x[None, :])[0]
    rhs = y[j] * expr.evaluate(x[None, :])[0]
    return float(abs(lhs - rhs))


@dataclass(frozen=True)
class KernelEvaluator:
    """Evaluation handle pairing a multiplicity spec with a truncation level.

    The series engine enforces a relative truncation of 1e-16 internally;
    a looser requested tolerance is accepted but not used to stop earlier.
    """

    spec: MultiplicitySpec
    tolerance: float = 1e-16

    def __post_init__(self):
        if not 0 < self.tolerance <= 1e-8:
            raise ValueError("tolerance must lie in (0, 1e-8]")

    def evaluate(self, z, w) -> np.ndarray:
        return kernel_nd(self.spec, z, w)
