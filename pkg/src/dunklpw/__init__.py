"""Dunkl harmonic analysis on R^d for the reflection group Z_2^d, and
real Paley-Wiener estimators recovering the support geometry of a Dunkl
spectrum from norm-growth sequences."""

from .core import (
    MultiplicitySpec,
    QuadratureGrid,
    SampledFunction,
    SeriesRangeError,
    btilde,
    build_grid,
    gauss_jacobi_rule,
    mehta_constant,
    normalized_bessel,
    weight_eval,
)
from .expr import FunctionExpr, from_text
from .kernel import KernelEvaluator, kernel_1d, kernel_nd
from .operators import PolynomialSpec, dunkl_apply, dunkl_laplacian, poly_iT_apply
from .transform import (
    TransformPlan,
    forward,
    inverse,
    lp_norm,
    make_plan,
    multiplier_apply,
    plancherel_defect,
)
from .conv import convolve, heat_smooth, translate_spectral
from .paleywiener import (
    ConvergenceSequence,
    EstimatorReport,
    SymmetricBodySpec,
    extrapolate_limit,
    heat_series_direct_check,
    heat_series_norm,
    inner_radius,
    poly_spectrum_sup,
    support_radius_spatial,
    support_radius_spectral,
    symmetric_body_test,
    tore_localization,
)

__version__ = "0.1.0"

__all__ = [
    "MultiplicitySpec",
    "QuadratureGrid",
    "SampledFunction",
    "SeriesRangeError",
    "btilde",
    "build_grid",
    "gauss_jacobi_rule",
    "mehta_constant",
    "normalized_bessel",
    "weight_eval",
    "FunctionExpr",
    "from_text",
    "KernelEvaluator",
    "kernel_1d",
    "kernel_nd",
    "PolynomialSpec",
    "dunkl_apply",
    "dunkl_laplacian",
    "poly_iT_apply",
    "TransformPlan",
    "forward",
    "inverse",
    "lp_norm",
    "make_plan",
    "multiplier_apply",
    "plancherel_defect",
    "convolve",
    "heat_smooth",
    "translate_spectral",
    "ConvergenceSequence",
    "EstimatorReport",
    "SymmetricBodySpec",
    "extrapolate_limit",
    "heat_series_direct_check",
    "heat_series_norm",
    "inner_radius",
    "poly_spectrum_sup",
    "support_radius_spatial",
    "support_radius_spectral",
    "symmetric_body_test",
    "tore_localization",
    "__version__",
]
