"""Reflection-group data for Z_2^d, weight and normalizing constants,
special functions, quadrature rules, and sampled-function containers.

Everything here is shared by the kernel, operator, transform and estimator
modules.  The reflection group is fixed to W = Z_2^d acting by coordinate
sign flips; the multiplicity function reduces to one value gamma_j >= 0 per
coordinate, and the weight is

    omega_k(x) = prod_j |x_j|^(2 gamma_j),

homogeneous of degree 2 gamma with gamma = sum_j gamma_j.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import jv, roots_jacobi, roots_legendre

from ._backend import compile_elementwise

__all__ = [
    "MultiplicitySpec",
    "QuadratureGrid",
    "SampledFunction",
    "SeriesRangeError",
    "weight_eval",
    "mehta_constant",
    "normalized_bessel",
    "btilde",
    "gauss_jacobi_rule",
    "build_grid",
]


class SeriesRangeError(ValueError):
    """Bessel series did not converge within the term budget.

    Raised when an argument lands outside the range the series can resolve
    in float64; the caller must rescale the grid instead of trusting a
    truncated sum.
    """


# ---------------------------------------------------------------------------
# multiplicity data


@dataclass(frozen=True)
class MultiplicitySpec:
    """Dimension and per-coordinate multiplicities for W = Z_2^d.

    Parameters
    ----------
    d : int
        Dimension, at least 1.
    gammas : tuple of float
        One multiplicity value gamma_j >= 0 per coordinate.  gamma_j = 0 is
        admitted as the classical-Fourier degenerate case; formulas that are
        undefined at gamma = 0 (the 1-D translation weight) reject it
        explicitly at their call sites.
    """

    d: int
    gammas: tuple

    def __post_init__(self):
        if not isinstance(self.d, int) or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d!r}")
        gam = tuple(float(g) for g in self.gammas)
        if len(gam) != self.d:
            raise ValueError(
                f"expected {self.d} multiplicity values, got {len(gam)}"
            )
        for g in gam:
            if not math.isfinite(g) or g < 0.0:
                raise ValueError(f"multiplicities must be finite and >= 0, got {g}")
        object.__setattr__(self, "gammas", gam)

    @property
    def gamma_total(self) -> float:
        """Total index gamma = sum_j gamma_j."""
        return float(sum(self.gammas))

    @property
    def homogeneity_degree(self) -> float:
        """Degree 2*gamma of the weight omega_k."""
        return 2.0 * self.gamma_total


def weight_eval(spec: MultiplicitySpec, x) -> np.ndarray:
    """Weight omega_k(x) = prod_j |x_j|^(2 gamma_j).

    Parameters
    ----------
    spec : MultiplicitySpec
    x : array_like, shape (..., d)
        Evaluation points.

    Returns
    -------
    ndarray, shape (...)
        Nonnegative weight values; 0^0 is taken as 1 for gamma_j = 0.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (spec.d,):
        if spec.d == 1 and x.ndim == 0:
            x = x.reshape(1)
        else:
            raise ValueError(f"points must have trailing dimension {spec.d}")
    out = np.ones(x.shape[:-1], dtype=float)
    for j, g in enumerate(spec.gammas):
        if g > 0.0:
            out = out * np.abs(x[..., j]) ** (2.0 * g)
    return out


def mehta_constant(spec: MultiplicitySpec) -> float:
    """Mehta-type constant c_k = (integral of e^{-||x||^2} omega_k dx)^{-1}.

    For Z_2^d the Gaussian integral factorizes per axis into
    Gamma(gamma_j + 1/2), so c_k = prod_j Gamma(gamma_j + 1/2)^{-1}.
    """
    return float(np.prod([1.0 / gamma_fn(g + 0.5) for g in spec.gammas]))


# ---------------------------------------------------------------------------
# normalized Bessel function
#
# j_alpha(z) = Gamma(alpha+1) sum_n (-1)^n (z/2)^(2n) / (n! Gamma(alpha+1+n))
#
# is even in z, so it is a function of u = z^2 alone; btilde(alpha, u) is
# that representation.  The series alternates for u > 0 and loses roughly
# e^(sqrt(u)) of precision to cancellation, so it is only used for u <= 64;
# beyond that the evaluation is routed through scipy's J_alpha, which has no
# cancellation problem.  For u <= 0 every term is positive and the series is
# stable at any magnitude the term budget can reach.

_SERIES_U_MAX = 64.0
_SERIES_CAP = 200
_SERIES_RTOL = 1e-17


def _btilde_series_flat(u, alpha, cap, rtol, out):
    nfail = 0
    for i in range(u.shape[0]):
        ui = u[i]
        acc = 1.0
        term = 1.0
        biggest = 1.0
        n = 1
        converged = False
        while n <= cap:
            term = term * (-0.25 * ui) / (n * (alpha + n))
            acc = acc + term
            a = abs(acc)
            if a > biggest:
                biggest = a
            if abs(term) < rtol * biggest:
                converged = True
                break
            n += 1
        if not converged:
            nfail += 1
            out[i] = np.nan
        else:
            out[i] = acc
    return nfail


_btilde_series_flat = compile_elementwise(_btilde_series_flat)


def btilde(alpha: float, u) -> np.ndarray:
    """Even-argument form of the normalized Bessel function.

    Returns B(u) with j_alpha(z) = B(z^2); u may be any real (negative u
    corresponds to purely imaginary z, where j_alpha grows like cosh).

    Parameters
    ----------
    alpha : float
        Index, must exceed -1.
    u : array_like of float

    Raises
    ------
    SeriesRangeError
        If the series branch fails to converge within the term budget.
    """
    if alpha <= -1.0:
        raise ValueError(f"index must exceed -1, got {alpha}")
    u = np.asarray(u, dtype=float)
    scalar = u.ndim == 0
    u = np.atleast_1d(u)
    out = np.empty_like(u)

    small = u <= _SERIES_U_MAX
    if np.any(small):
        us = np.ascontiguousarray(u[small])
        res = np.empty_like(us)
        nfail = _btilde_series_flat(us, float(alpha), _SERIES_CAP, _SERIES_RTOL, res)
        if nfail:
            raise SeriesRangeError(
                f"Bessel series did not converge for {nfail} argument(s) "
                f"(|u| up to {np.max(np.abs(us)):.3g}); rescale the grid"
            )
        out[small] = res
    if np.any(~small):
        z = np.sqrt(u[~small])
        out[~small] = gamma_fn(alpha + 1.0) * (2.0 / z) ** alpha * jv(alpha, z)
    return out[0] if scalar else out


def _nbessel_series_complex(alpha: float, z: np.ndarray) -> np.ndarray:
    u = z.astype(complex) ** 2
    acc = np.ones_like(u)
    term = np.ones_like(u)
    biggest = np.ones(u.shape, dtype=float)
    for n in range(1, _SERIES_CAP + 1):
        term = term * (-0.25 * u) / (n * (alpha + n))
        acc = acc + term
        np.maximum(biggest, np.abs(acc), out=biggest)
        if np.all(np.abs(term) < _SERIES_RTOL * biggest):
            return acc
    raise SeriesRangeError(
        "complex Bessel series did not converge within the term budget; "
        "rescale the grid"
    )


def normalized_bessel(alpha: float, z):
    """Normalized Bessel function j_alpha(z).

    j_alpha(z) = Gamma(alpha+1) sum_n (-1)^n (z/2)^(2n) / (n! Gamma(alpha+1+n)),
    with j_{-1/2} = cos and j_{1/2}(z) = sin(z)/z.

    Real and purely imaginary arguments of any grid-scale magnitude are
    supported; general complex arguments are restricted to |z| <= 8, where
    the series is accurate in float64.

    Parameters
    ----------
    alpha : float
        Index, >= -1/2 for the kernel formulas (any alpha > -1 accepted).
    z : array_like, real or complex

    Returns
    -------
    ndarray or scalar; real for real input, complex for complex input.
    """
    z = np.asarray(z)
    if np.iscomplexobj(z):
        scalar = z.ndim == 0
        z = np.atleast_1d(z)
        out = np.empty(z.shape, dtype=complex)
        re_axis = z.imag == 0.0
        im_axis = ~re_axis & (z.real == 0.0)
        general = ~re_axis & ~im_axis
        if np.any(re_axis):
            out[re_axis] = btilde(alpha, z.real[re_axis] ** 2)
        if np.any(im_axis):
            out[im_axis] = btilde(alpha, -(z.imag[im_axis] ** 2))
        if np.any(general):
            zg = z[general]
            if np.any(np.abs(zg) > 8.0):
                raise SeriesRangeError(
                    "general complex arguments are limited to |z| <= 8"
                )
            out[general] = _nbessel_series_complex(alpha, zg)
        return out[0] if scalar else out
    return btilde(alpha, np.asarray(z, dtype=float) ** 2)


def gauss_jacobi_rule(n: int, exponent: float):
    """Gauss-Jacobi nodes and weights on [-1, 1] for weight (1-t^2)^exponent.

    Exact for polynomials of degree <= 2n-1 against the weight; the
    endpoint singularity for exponent in (-1, 0) is absorbed into the
    weights.

    Parameters
    ----------
    n : int
        Node count, >= 1.
    exponent : float
        Must exceed -1 (integrability).

    Returns
    -------
    nodes, weights : ndarray
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"node count must be a positive integer, got {n!r}")
    exponent = float(exponent)
    if not exponent > -1.0:
        raise ValueError(
            f"weight exponent must exceed -1 for integrability, got {exponent}"
        )
    nodes, weights = roots_jacobi(int(n), exponent, exponent)
    return nodes, weights


# ---------------------------------------------------------------------------
# quadrature grids


@dataclass(frozen=True)
class QuadratureGrid:
    """Tensor-product quadrature grid on a box prod_j [-L_j, L_j].

    Per-axis node and weight lists; weights are plain Lebesgue weights (the
    omega_k factor is applied by the norm and transform routines).  Panels
    never straddle 0 (the weight has a kink there) nor any declared
    breakpoint, so piecewise-smooth integrands are integrated panel-exactly.
    """

    axes_nodes: tuple
    axes_weights: tuple
    extents: tuple
    scheme: str

    def __post_init__(self):
        if self.scheme not in ("gauss_legendre_panels", "trapezoid"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not (len(self.axes_nodes) == len(self.axes_weights) == len(self.extents)):
            raise ValueError("per-axis lists must have equal length")
        vol = 1.0
        box = 1.0
        for nodes, weights, ext in zip(self.axes_nodes, self.axes_weights, self.extents):
            if np.any(weights <= 0.0):
                raise ValueError("quadrature weights must be strictly positive")
            if np.any(np.diff(nodes) <= 0.0):
                raise ValueError("nodes must be strictly increasing per axis")
            vol *= float(np.sum(weights))
            box *= 2.0 * ext
        if abs(vol - box) > 1e-12 * box:
            raise ValueError(
                f"weights integrate the constant to {vol!r}, expected {box!r}"
            )

    @property
    def d(self) -> int:
        return len(self.axes_nodes)

    @property
    def shape(self) -> tuple:
        return tuple(len(n) for n in self.axes_nodes)

    def axis_measure(self, spec: MultiplicitySpec, j: int) -> np.ndarray:
        """Quadrature weights times |t|^(2 gamma_j) for axis j."""
        return self.axes_weights[j] * np.abs(self.axes_nodes[j]) ** (
            2.0 * spec.gammas[j]
        )

    def meshes(self):
        """Full tensor meshgrids of the node lists (indexing='ij')."""
        return np.meshgrid(*self.axes_nodes, indexing="ij")

    def points(self) -> np.ndarray:
        """All nodes as an array of shape (*shape, d)."""
        return np.stack(self.meshes(), axis=-1)

    def integrate(self, values: np.ndarray, spec: MultiplicitySpec | None = None):
        """Tensor quadrature of sampled values, optionally against omega_k."""
        v = np.asarray(values)
        if v.shape != self.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.shape}")
        for j in range(self.d - 1, -1, -1):
            w = self.axes_weights[j] if spec is None else self.axis_measure(spec, j)
            v = np.tensordot(v, w, axes=([j], [0]))
        return v


def _axis_rule(extent, panel_width, nodes_per_panel, breakpoints, budget):
    edges = {0.0, float(extent)}
    for b in breakpoints:
        b = abs(float(b))
        if 0.0 < b < extent:
            edges.add(b)
    edges = sorted(edges)
    # uniform sub-edges between mandatory edges, near the requested width
    width = float(panel_width)
    while True:
        panels = []
        for a, b in zip(edges[:-1], edges[1:]):
            m = max(1, int(math.ceil((b - a) / width - 1e-9)))
            sub = np.linspace(a, b, m + 1)
            for lo, hi in zip(sub[:-1], sub[1:]):
                panels.append((lo, hi))
        total = 2 * len(panels) * nodes_per_panel
        if budget is None or total <= budget:
            break
        width *= 1.5
        if width > 2.0 * extent:
            raise ValueError(
                f"cannot satisfy node budget {budget} with {len(edges) - 1} "
                f"mandatory panels of {nodes_per_panel} nodes"
            )
    xg, wg = roots_legendre(nodes_per_panel)
    nodes, weights = [], []
    both = [(-hi, -lo) for lo, hi in panels[::-1]] + panels
    for lo, hi in both:
        h = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        nodes.append(mid + h * xg)
        weights.append(h * wg)
    return np.concatenate(nodes), np.concatenate(weights)


def build_grid(
    extents,
    *,
    scheme: str = "gauss_legendre_panels",
    panel_width: float = 0.5,
    nodes_per_panel: int = 32,
    breakpoints=None,
    node_budget: int | None = None,
) -> QuadratureGrid:
    """Build a tensor-product grid on prod_j [-L_j, L_j].

    Parameters
    ----------
    extents : sequence of float
        Half-widths L_j per axis.
    scheme : {'gauss_legendre_panels', 'trapezoid'}
        Composite Gauss-Legendre panels (default: 32 nodes per panel, panel
        width 0.5) or a uniform trapezoid rule.
    panel_width : float
        Requested panel width; widened automatically if a node budget is
        given and would be exceeded.
    breakpoints : sequence of sequences, optional
        Per-axis lists of |t| values that panel boundaries must align to
        (indicator edges, weight kinks beyond the mandatory one at 0).
    nodes_per_panel : int
    node_budget : int, optional
        Maximum nodes per axis.
    """
    extents = [float(L) for L in extents]
    if any(L <= 0 for L in extents):
        raise ValueError("extents must be positive")
    d = len(extents)
    if breakpoints is None:
        breakpoints = [()] * d
    if len(breakpoints) != d:
        raise ValueError("need one breakpoint list per axis")
    axes_nodes, axes_weights = [], []
    for L, bks in zip(extents, breakpoints):
        if scheme == "gauss_legendre_panels":
            n, w = _axis_rule(L, panel_width, nodes_per_panel, bks, node_budget)
        elif scheme == "trapezoid":
            count = node_budget or 512
            n = np.linspace(-L, L, count)
            h = n[1] - n[0]
            w = np.full(count, h)
            w[0] = w[-1] = 0.5 * h
        else:
            raise ValueError(f"unknown scheme {scheme!r}")
        axes_nodes.append(n)
        axes_weights.append(w)
    return QuadratureGrid(
        axes_nodes=tuple(axes_nodes),
        axes_weights=tuple(axes_weights),
        extents=tuple(extents),
        scheme=scheme,
    )


# ---------------------------------------------------------------------------
# sampled functions


@dataclass
class SampledFunction:
    """Values of a function on a tensor-product quadrature grid.

    Attributes
    ----------
    grid : QuadratureGrid
    values : ndarray
        Complex array of shape ``grid.shape``.
    flags : dict
        Diagnostics attached by producers (truncation warnings and the
        like); absent keys mean no issue was detected.
    """

    grid: QuadratureGrid
    values: np.ndarray
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ValueError(
                f"value array shape {v.shape} does not match grid {self.grid.shape}"
            )
        self.values = v

    def to_csv(self, path):
        """Write nodes and values as CSV columns x1..xd, re, im (C-order)."""
        pts = self.grid.points().reshape(-1, self.grid.d)
        vals = self.values.reshape(-1)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([f"x{j + 1}" for j in range(self.grid.d)] + ["re", "im"])
            for row, v in zip(pts, vals):
                writer.writerow(
                    [repr(float(c)) for c in row] + [repr(float(v.real)), repr(float(v.imag))]
                )

    @staticmethod
    def read_csv_values(path, grid: QuadratureGrid) -> "SampledFunction":
        """Read a CSV written by :meth:`to_csv` back onto a known grid."""
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header[-2:] != ["re", "im"]:
                raise ValueError("CSV header must end with re, im columns")
            vals = [complex(float(r[-2]), float(r[-1])) for r in reader]
        arr = np.asarray(vals, dtype=complex)
        if arr.size != int(np.prod(grid.shape)):
            raise ValueError("CSV row count does not match the grid")
        return SampledFunction(grid=grid, values=arr.reshape(grid.shape))
