"""Differential-difference operators on closed-form expressions.

The rank-one reflection along axis j acts by flipping the sign of x_j, and
the associated operator is

    T_j f(x) = d_j f(x) + gamma_j * (f(x) - f(sigma_j x)) / x_j.

For admissible expressions (every factor even in x_j) the difference
f - f(sigma_j x) carries only odd powers of x_j in each term, so the
division by x_j is carried out exactly in the term algebra.  The quotient
is then a plain grammar expression with no singularity at x_j = 0; no
numerical limit rule is needed, and results evaluate finitely everywhere.

The Laplacian is composed as sum_j T_j^2, and P(iT) expands a polynomial
in the operators with complex coefficients i^{|mu|}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import MultiplicitySpec
from .expr import FunctionExpr

__all__ = [
    "PolynomialSpec",
    "OperatorResult",
    "dunkl_apply",
    "dunkl_laplacian",
    "poly_iT_apply",
    "MAX_OPERATOR_DEPTH",
]

# Beyond this many cumulative derivative orders the expanded expressions grow
# without bound; deeper powers go through the frequency-side multiplier route.
MAX_OPERATOR_DEPTH = 24


@dataclass(frozen=True)
class PolynomialSpec:
    """Polynomial P(y) = sum over (mu, c) of c * y^mu, mu a multi-index."""

    terms: tuple  # ((mu, complex), ...)

    def __post_init__(self):
        if not self.terms:
            raise ValueError("polynomial must have at least one term")
        d = len(self.terms[0][0])
        cleaned = []
        for mu, c in self.terms:
            mu = tuple(int(m) for m in mu)
            if len(mu) != d:
                raise ValueError("all multi-indices must share one dimension")
            if any(m < 0 for m in mu):
                raise ValueError("multi-indices must be nonnegative")
            c = complex(c)
            if c != 0:
                cleaned.append((mu, c))
        if not any(sum(mu) >= 1 for mu, _ in cleaned):
            raise ValueError("polynomial must be non-constant")
        cleaned.sort(key=lambda t: t[0])
        object.__setattr__(self, "terms", tuple(cleaned))

    @staticmethod
    def from_dict(mapping) -> "PolynomialSpec":
        return PolynomialSpec(tuple(mapping.items()))

    @staticmethod
    def negative_normsq(d: int) -> "PolynomialSpec":
        """P(y) = -||y||^2, for which P(iT) is the Laplacian."""
        return PolynomialSpec(
            tuple(
                (tuple(2 if i == j else 0 for i in range(d)), -1.0)
                for j in range(d)
            )
        )

    @property
    def d(self) -> int:
        return len(self.terms[0][0])

    @property
    def degree(self) -> int:
        return max(sum(mu) for mu, _ in self.terms)

    def evaluate(self, y) -> complex:
        """P(y) at a single (possibly complex) point y."""
        y = np.asarray(y, dtype=complex)
        total = 0.0 + 0.0j
        for mu, c in self.terms:
            v = c
            for j, m in enumerate(mu):
                if m:
                    v = v * y[j] ** m
            total += v
        return complex(total)


@dataclass(frozen=True)
class OperatorResult:
    """Expression output of an operator pipeline plus its application log."""

    expr: FunctionExpr
    log: tuple = field(default_factory=tuple)


def _check_admissible(spec: MultiplicitySpec, f: FunctionExpr):
    if f.side != "space":
        raise ValueError("operators act on space-side expressions")
    if f.d != spec.d:
        raise ValueError(f"expression dimension {f.d} does not match spec d={spec.d}")
    if not f.is_differentiable:
        raise ValueError(
            "expression contains an indicator factor and cannot be differentiated"
        )


def dunkl_apply(spec: MultiplicitySpec, j: int, f: FunctionExpr) -> FunctionExpr:
    """T_j f, with the difference quotient divided out exactly."""
    _check_admissible(spec, f)
    if not 0 <= j < spec.d:
        raise ValueError(f"axis {j} out of range for d={spec.d}")
    df = f.partial(j)
    gamma = spec.gammas[j]
    if gamma == 0.0:
        return df
    diff = f - f.reflect(j)
    if diff.is_zero:
        return df
    try:
        quotient = diff.divide_by_coordinate(j)
    except ValueError as exc:
        raise ValueError(
            f"difference along axis {j + 1} does not divide exactly; every "
            "factor must be even in the reflected coordinate"
        ) from exc
    return df + gamma * quotient


def dunkl_laplacian(spec: MultiplicitySpec, f: FunctionExpr) -> FunctionExpr:
    """sum_j T_j^2 f, composed from dunkl_apply."""
    _check_admissible(spec, f)
    out = FunctionExpr.zero(spec.d, "space")
    for j in range(spec.d):
        out = out + dunkl_apply(spec, j, dunkl_apply(spec, j, f))
    return out


def _realify(f: FunctionExpr):
    """Drop imaginary parts when they are relatively negligible."""
    if f.is_zero:
        return f, True
    mags = [abs(c) for c in f.terms.values()]
    imag = [abs(c.imag) for c in f.terms.values()]
    if max(imag) <= 1e-10 * max(mags):
        terms = {k: complex(c.real, 0.0) for k, c in f.terms.items()}
        terms = {k: c for k, c in terms.items() if c != 0}
        return FunctionExpr(f.side, f.d, terms), True
    return f, False


def poly_iT_apply(
    spec: MultiplicitySpec, P: PolynomialSpec, f: FunctionExpr, n: int = 1
) -> OperatorResult:
    """Apply P(iT) to f, n times.

    Expands P(iT) = sum_mu c_mu i^{|mu|} T^mu with the multi-index terms
    processed in lexicographic order and axes applied in increasing order.
    For P(y) = -||y||^2 a single application is the Laplacian.
    """
    _check_admissible(spec, f)
    if P.d != spec.d:
        raise ValueError(f"polynomial dimension {P.d} does not match spec d={spec.d}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError("iteration count must be a positive integer")
    depth = n * P.degree
    if depth > MAX_OPERATOR_DEPTH:
        raise ValueError(
            f"requested depth n*deg(P) = {depth} exceeds the expansion cap "
            f"{MAX_OPERATOR_DEPTH}; use the frequency-side multiplier route "
            "for deeper powers"
        )
    log = [f"expand: {len(P.terms)} monomials, degree {P.degree}, {n} pass(es)"]
    current = f
    # cache T^mu prefixes within one pass; mu are lexicographically sorted so
    # prefix reuse is natural
    for it in range(int(n)):
        cache = {(0,) * spec.d: current}

        def t_power(mu):
            if mu in cache:
                return cache[mu]
            for j in reversed(range(spec.d)):
                if mu[j] > 0:
                    prev = list(mu)
                    prev[j] -= 1
                    base = t_power(tuple(prev))
                    out = dunkl_apply(spec, j, base)
                    cache[mu] = out
                    return out
            raise AssertionError("unreachable")

        acc = FunctionExpr.zero(spec.d, "space")
        for mu, c in P.terms:
            weight = c * (1j) ** sum(mu)
            acc = acc + weight * t_power(mu)
        current = acc
    current, realified = _realify(current)
    log.append("realified" if realified else "complex_retained")
    return OperatorResult(expr=current, log=tuple(log))
