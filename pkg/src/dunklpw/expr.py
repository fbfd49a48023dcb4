"""Closed-form scalar functions on R^d from a small expression grammar.

A :class:`FunctionExpr` is a finite sum of terms

    coeff * x^p * prod(factors),

where ``x^p`` is a per-axis monomial (integer exponents, possibly negative
via division) and each factor is one of

* ``exp(P)``        with P a polynomial,
* ``bessel(a, P)``  the even-argument normalized Bessel form B_a(P), where
  ``B_a(z^2) = j_a(z)``; note ``d/du B_a(u) = -B_{a+1}(u) / (4(a+1))``, so
  the family is closed under differentiation,
* an indicator of a symmetric box, ball, or annulus (non-differentiable;
  carried for frequency-side spectra and norms).

The representation is canonical (terms merged on identical monomial/factor
keys, constant factors folded into coefficients), closed under +, -, *,
integer powers, partial derivatives, and the sign-flip reflections of
Z_2^d.  That last closure is what the difference-quotient part of the Dunkl
operators needs: for admissible expressions, f - f(sigma_j x) has only
odd powers of x_j in every term and divides by x_j exactly, with no
numerical limit rule.

Text grammar (EBNF, used by the CLI's function-spec files)::

    file    = { header sep } body
    header  = "side" "=" ("space" | "frequency") | "d" "=" integer
    body    = "body" "=" expr
    sep     = ";" | newline
    expr    = term { ("+" | "-") term }
    term    = unary { ("*" | "/") unary }
    unary   = "-" unary | power
    power   = atom [ "^" integer ]
    atom    = number | "pi" | var | call | "(" expr ")"
    var     = ("x" | "y") [ digits ] | "r2"
    call    = name "(" [ arg { "," arg } ] ")"
    arg     = [ name "=" ] expr

``x``/``x1``..``xd`` name coordinates of space-side expressions and
``y``/``y1``..``yd`` frequency-side ones; ``r2`` is the squared radius.
Calls: ``exp(P)``, ``gaussian(a)`` = exp(-a*r2), ``bessel(alpha, P)``,
``indicator_box(h=..)`` (or per-axis ``h1=..,h2=..``), ``indicator_ball(r=..)``,
``indicator_annulus(rmin=.., rmax=..)``.  Division is restricted to
constants and monomials so that the result stays in the grammar.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .core import btilde

__all__ = [
    "FunctionExpr",
    "Poly",
    "ExpFactor",
    "BesselFactor",
    "IndicatorFactor",
    "from_text",
    "GRAMMAR_DOC",
]

GRAMMAR_DOC = __doc__

_ZERO_TOL = 0.0  # coefficients are pruned only when exactly zero


# ---------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class Poly:
    """Polynomial in d variables as a sorted tuple of (powers, (re, im))."""

    d: int
    coeffs: tuple

    @staticmethod
    def from_dict(d: int, mapping) -> "Poly":
        items = []
        for powers, c in mapping.items():
            c = complex(c)
            if c != 0:
                items.append((tuple(int(p) for p in powers), (c.real, c.imag)))
        items.sort()
        return Poly(d=d, coeffs=tuple(items))

    def to_dict(self) -> dict:
        return {p: complex(re, im) for p, (re, im) in self.coeffs}

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def is_constant(self) -> bool:
        return all(all(p == 0 for p in powers) for powers, _ in self.coeffs)

    def constant_value(self) -> complex:
        return self.to_dict().get((0,) * self.d, 0.0 + 0.0j)

    def add(self, other: "Poly") -> "Poly":
        out = self.to_dict()
        for p, c in other.to_dict().items():
            out[p] = out.get(p, 0.0) + c
        return Poly.from_dict(self.d, out)

    def scale(self, s: complex) -> "Poly":
        return Poly.from_dict(self.d, {p: s * c for p, c in self.to_dict().items()})

    def mul(self, other: "Poly") -> "Poly":
        out = {}
        for p, c in self.to_dict().items():
            for q, e in other.to_dict().items():
                key = tuple(a + b for a, b in zip(p, q))
                out[key] = out.get(key, 0.0) + c * e
        return Poly.from_dict(self.d, out)

    def partial(self, j: int) -> "Poly":
        out = {}
        for p, c in self.to_dict().items():
            if p[j] == 0:
                continue
            q = list(p)
            q[j] -= 1
            key = tuple(q)
            out[key] = out.get(key, 0.0) + c * p[j]
        return Poly.from_dict(self.d, out)

    def reflect(self, j: int) -> "Poly":
        return Poly.from_dict(
            self.d,
            {p: (-c if p[j] % 2 else c) for p, c in self.to_dict().items()},
        )

    def is_even_in(self, j: int) -> bool:
        return all(powers[j] % 2 == 0 for powers, _ in self.coeffs)

    def scale_argument(self, s: float) -> "Poly":
        return Poly.from_dict(
            self.d,
            {p: c * s ** sum(p) for p, c in self.to_dict().items()},
        )

    def eval(self, points: np.ndarray) -> np.ndarray:
        out = np.zeros(points.shape[:-1], dtype=complex)
        for powers, (re_, im_) in self.coeffs:
            mono = np.ones(points.shape[:-1], dtype=float)
            for j, p in enumerate(powers):
                if p:
                    mono = mono * points[..., j] ** p
            out = out + complex(re_, im_) * mono
        return out

    def radial_form(self):
        """Return (a, c) if the polynomial equals a*r2 + c, else None."""
        const = 0.0 + 0.0j
        a = None
        seen_axes = set()
        for powers, (re_, im_) in self.coeffs:
            c = complex(re_, im_)
            total = sum(powers)
            if total == 0:
                const = c
                continue
            if total != 2 or sorted(powers, reverse=True)[0] != 2:
                return None
            axis = powers.index(2)
            if a is None:
                a = c
            elif c != a:
                return None
            seen_axes.add(axis)
        if a is None:
            return (0.0 + 0.0j, const)
        if seen_axes != set(range(self.d)):
            return None
        return (a, const)

    def to_text(self, letter: str) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for powers, (re_, im_) in self.coeffs:
            bits = [_fmt_coeff(complex(re_, im_))]
            for j, p in enumerate(powers):
                if p == 0:
                    continue
                v = f"{letter}{j + 1}"
                bits.append(v if p == 1 else f"{v}^{p}")
            parts.append("*".join(bits))
        return " + ".join(parts)


def _fmt_coeff(c: complex) -> str:
    if c.imag == 0.0:
        return repr(float(c.real))
    return f"({c!r})"


# ---------------------------------------------------------------------------
# factors


@dataclass(frozen=True)
class ExpFactor:
    poly: Poly

    def sort_key(self):
        return ("exp", 0.0, self.poly.coeffs)


@dataclass(frozen=True)
class BesselFactor:
    alpha: float
    poly: Poly

    def sort_key(self):
        return ("bes", float(self.alpha), self.poly.coeffs)


@dataclass(frozen=True)
class IndicatorFactor:
    kind: str  # box | ball | annulus
    params: tuple

    def sort_key(self):
        return ("ind", 0.0, (self.kind, self.params))


def _normalize(coeff: complex, powers: tuple, factors) -> tuple:
    """Fold constant factors, merge exponentials, sort; return a term triple."""
    exp_poly = None
    bessels = []
    indicators = []
    for f in factors:
        if isinstance(f, ExpFactor):
            exp_poly = f.poly if exp_poly is None else exp_poly.add(f.poly)
        elif isinstance(f, BesselFactor):
            if f.poly.is_constant:
                u = f.poly.constant_value()
                if abs(u.imag) > 1e-14 * max(1.0, abs(u)):
                    raise ValueError("Bessel factor argument must be real")
                coeff = coeff * complex(btilde(f.alpha, u.real))
            else:
                bessels.append(f)
        elif isinstance(f, IndicatorFactor):
            if f not in indicators:
                indicators.append(f)
        else:
            raise TypeError(f"unknown factor {f!r}")
    out = []
    if exp_poly is not None:
        const = exp_poly.constant_value()
        if const != 0:
            coeff = coeff * np.exp(const)
            exp_poly = exp_poly.add(Poly.from_dict(exp_poly.d, {(0,) * exp_poly.d: -const}))
        if not exp_poly.is_zero:
            out.append(ExpFactor(exp_poly))
    out.extend(bessels)
    out.extend(indicators)
    out.sort(key=lambda f: f.sort_key())
    return coeff, tuple(powers), tuple(out)


# ---------------------------------------------------------------------------
# expressions


class FunctionExpr:
    """Canonical sum-of-terms expression; see the module docstring."""

    __slots__ = ("side", "d", "terms")

    def __init__(self, side: str, d: int, terms: dict):
        if side not in ("space", "frequency"):
            raise ValueError(f"side must be 'space' or 'frequency', got {side!r}")
        if not isinstance(d, int) or d < 1:
            raise ValueError(f"dimension must be a positive integer, got {d!r}")
        object.__setattr__(self, "side", side)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "terms", dict(terms))

    def __setattr__(self, *args):
        raise AttributeError("FunctionExpr is immutable")

    # -- construction -------------------------------------------------------

    @staticmethod
    def _build(side, d, triples) -> "FunctionExpr":
        terms = {}
        for coeff, powers, factors in triples:
            coeff, powers, factors = _normalize(complex(coeff), powers, factors)
            if coeff == 0:
                continue
            key = (powers, factors)
            acc = terms.get(key, 0.0 + 0.0j) + coeff
            if acc == 0:
                terms.pop(key, None)
            else:
                terms[key] = acc
        return FunctionExpr(side, d, terms)

    @classmethod
    def constant(cls, d: int, value, side: str = "space") -> "FunctionExpr":
        return cls._build(side, d, [(complex(value), (0,) * d, ())])

    @classmethod
    def coordinate(cls, d: int, j: int, side: str = "space") -> "FunctionExpr":
        if not 0 <= j < d:
            raise ValueError(f"axis {j} out of range for dimension {d}")
        powers = tuple(1 if i == j else 0 for i in range(d))
        return cls._build(side, d, [(1.0, powers, ())])

    @classmethod
    def normsq(cls, d: int, side: str = "space") -> "FunctionExpr":
        triples = []
        for j in range(d):
            powers = tuple(2 if i == j else 0 for i in range(d))
            triples.append((1.0, powers, ()))
        return cls._build(side, d, triples)

    @classmethod
    def gaussian(cls, d: int, rate: float, side: str = "space") -> "FunctionExpr":
        """exp(-rate * ||x||^2)."""
        poly = Poly.from_dict(
            d, {tuple(2 if i == j else 0 for i in range(d)): -float(rate) for j in range(d)}
        )
        return cls._build(side, d, [(1.0, (0,) * d, (ExpFactor(poly),))])

    @classmethod
    def exp_of(cls, poly_expr: "FunctionExpr") -> "FunctionExpr":
        poly = poly_expr._as_poly("exp")
        return cls._build(
            poly_expr.side, poly_expr.d, [(1.0, (0,) * poly_expr.d, (ExpFactor(poly),))]
        )

    @classmethod
    def bessel(cls, alpha: float, poly_expr: "FunctionExpr") -> "FunctionExpr":
        """Even-argument normalized Bessel B_alpha(P), with j_alpha(z) = B_alpha(z^2)."""
        if not float(alpha) > -1.0:
            raise ValueError(f"Bessel index must exceed -1, got {alpha}")
        poly = poly_expr._as_poly("bessel")
        return cls._build(
            poly_expr.side,
            poly_expr.d,
            [(1.0, (0,) * poly_expr.d, (BesselFactor(float(alpha), poly),))],
        )

    @classmethod
    def indicator_box(cls, d: int, halfwidths, side: str = "frequency") -> "FunctionExpr":
        if np.isscalar(halfwidths):
            halfwidths = (float(halfwidths),) * d
        hw = tuple(float(h) for h in halfwidths)
        if len(hw) != d or any(h <= 0 for h in hw):
            raise ValueError("box halfwidths must be positive, one per axis")
        return cls._build(side, d, [(1.0, (0,) * d, (IndicatorFactor("box", hw),))])

    @classmethod
    def indicator_ball(cls, d: int, r: float, side: str = "frequency") -> "FunctionExpr":
        if not float(r) > 0:
            raise ValueError(f"ball radius must be positive, got {r}")
        return cls._build(side, d, [(1.0, (0,) * d, (IndicatorFactor("ball", (float(r),)),))])

    @classmethod
    def indicator_annulus(
        cls, d: int, rmin: float, rmax: float, side: str = "frequency"
    ) -> "FunctionExpr":
        rmin, rmax = float(rmin), float(rmax)
        if not 0 <= rmin < rmax:
            raise ValueError(f"need 0 <= rmin < rmax, got {rmin}, {rmax}")
        return cls._build(
            side, d, [(1.0, (0,) * d, (IndicatorFactor("annulus", (rmin, rmax)),))]
        )

    @classmethod
    def zero(cls, d: int, side: str = "space") -> "FunctionExpr":
        return cls(side, d, {})

    # -- structure ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(
            all(p == 0 for p in powers) and not factors
            for powers, factors in self.terms
        )

    def constant_value(self) -> complex:
        if not self.is_constant:
            raise ValueError("expression is not constant")
        return sum(self.terms.values(), 0.0 + 0.0j)

    @property
    def is_differentiable(self) -> bool:
        return not any(
            isinstance(f, IndicatorFactor)
            for _, factors in self.terms
            for f in factors
        )

    def _as_poly(self, context: str) -> Poly:
        out = {}
        for (powers, factors), coeff in self.terms.items():
            if factors:
                raise ValueError(f"{context} argument must be a polynomial")
            if any(p < 0 for p in powers):
                raise ValueError(f"{context} argument must have nonnegative powers")
            out[powers] = out.get(powers, 0.0) + coeff
        return Poly.from_dict(self.d, out)

    def _check_mate(self, other: "FunctionExpr"):
        if self.side != other.side or self.d != other.d:
            raise ValueError(
                f"cannot combine expressions on side/d "
                f"({self.side},{self.d}) and ({other.side},{other.d})"
            )

    # -- algebra ------------------------------------------------------------

    def __add__(self, other):
        if np.isscalar(other):
            other = FunctionExpr.constant(self.d, other, self.side)
        self._check_mate(other)
        triples = [(c, p, f) for (p, f), c in self.terms.items()]
        triples += [(c, p, f) for (p, f), c in other.terms.items()]
        return FunctionExpr._build(self.side, self.d, triples)

    __radd__ = __add__

    def __neg__(self):
        return FunctionExpr(
            self.side, self.d, {k: -c for k, c in self.terms.items()}
        )

    def __sub__(self, other):
        if np.isscalar(other):
            other = FunctionExpr.constant(self.d, other, self.side)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            c = complex(other)
            if c == 0:
                return FunctionExpr.zero(self.d, self.side)
            return FunctionExpr(
                self.side, self.d, {k: c * v for k, v in self.terms.items()}
            )
        self._check_mate(other)
        triples = []
        for (p1, f1), c1 in self.terms.items():
            for (p2, f2), c2 in other.terms.items():
                powers = tuple(a + b for a, b in zip(p1, p2))
                triples.append((c1 * c2, powers, f1 + f2))
        return FunctionExpr._build(self.side, self.d, triples)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            if other == 0:
                raise ZeroDivisionError("division by zero constant")
            return self * (1.0 / complex(other))
        self._check_mate(other)
        if other.is_constant:
            return self * (1.0 / other.constant_value())
        if len(other.terms) == 1:
            ((powers, factors),) = other.terms.keys()
            if factors:
                raise ValueError("division is limited to constants and monomials")
            coeff = next(iter(other.terms.values()))
            triples = []
            for (p, f), c in self.terms.items():
                q = tuple(a - b for a, b in zip(p, powers))
                triples.append((c / coeff, q, f))
            return FunctionExpr._build(self.side, self.d, triples)
        raise ValueError("division is limited to constants and monomials")

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ValueError("powers of expressions must be nonnegative integers")
        out = FunctionExpr.constant(self.d, 1.0, self.side)
        for _ in range(int(n)):
            out = out * self
        return out

    # -- calculus and reflections -------------------------------------------

    def partial(self, j: int) -> "FunctionExpr":
        """Exact partial derivative along axis j."""
        if not self.is_differentiable:
            raise ValueError("expression contains an indicator and is not differentiable")
        if not 0 <= j < self.d:
            raise ValueError(f"axis {j} out of range")
        triples = []
        for (powers, factors), coeff in self.terms.items():
            if powers[j] != 0:
                q = list(powers)
                q[j] -= 1
                triples.append((coeff * powers[j], tuple(q), factors))
            for i, f in enumerate(factors):
                rest = factors[:i] + factors[i + 1 :]
                if isinstance(f, ExpFactor):
                    dp = f.poly.partial(j)
                    for mono, c in dp.to_dict().items():
                        powers2 = tuple(a + b for a, b in zip(powers, mono))
                        triples.append((coeff * c, powers2, rest + (f,)))
                elif isinstance(f, BesselFactor):
                    dp = f.poly.partial(j)
                    bumped = BesselFactor(f.alpha + 1.0, f.poly)
                    scale = -1.0 / (4.0 * (f.alpha + 1.0))
                    for mono, c in dp.to_dict().items():
                        powers2 = tuple(a + b for a, b in zip(powers, mono))
                        triples.append((coeff * c * scale, powers2, rest + (bumped,)))
        return FunctionExpr._build(self.side, self.d, triples)

    def reflect(self, j: int) -> "FunctionExpr":
        """Compose with the sign flip of coordinate j."""
        triples = []
        for (powers, factors), coeff in self.terms.items():
            c = -coeff if powers[j] % 2 else coeff
            newf = []
            for f in factors:
                if isinstance(f, ExpFactor):
                    newf.append(ExpFactor(f.poly.reflect(j)))
                elif isinstance(f, BesselFactor):
                    newf.append(BesselFactor(f.alpha, f.poly.reflect(j)))
                else:
                    newf.append(f)  # indicators here are symmetric
            triples.append((c, powers, tuple(newf)))
        return FunctionExpr._build(self.side, self.d, triples)

    def divide_by_coordinate(self, j: int) -> "FunctionExpr":
        """Exact division by x_j; every term must carry a nonzero power of x_j."""
        triples = []
        for (powers, factors), coeff in self.terms.items():
            if powers[j] == 0:
                raise ValueError(
                    f"term with no x_{j + 1} power cannot be divided exactly; "
                    "the expression is not reflection-divisible on this axis"
                )
            q = list(powers)
            q[j] -= 1
            triples.append((coeff, tuple(q), factors))
        return FunctionExpr._build(self.side, self.d, triples)

    def scale_argument(self, s: float) -> "FunctionExpr":
        """Return x -> f(s x)."""
        s = float(s)
        if s <= 0:
            raise ValueError("argument scale must be positive")
        triples = []
        for (powers, factors), coeff in self.terms.items():
            c = coeff * s ** sum(powers)
            newf = []
            for f in factors:
                if isinstance(f, ExpFactor):
                    newf.append(ExpFactor(f.poly.scale_argument(s)))
                elif isinstance(f, BesselFactor):
                    newf.append(BesselFactor(f.alpha, f.poly.scale_argument(s)))
                else:
                    params = tuple(p / s for p in f.params)
                    newf.append(IndicatorFactor(f.kind, params))
            triples.append((c, powers, tuple(newf)))
        return FunctionExpr._build(self.side, self.d, triples)

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, points) -> np.ndarray:
        """Evaluate at real points of shape (..., d); returns a complex array."""
        points = np.asarray(points, dtype=float)
        if points.shape[-1:] != (self.d,):
            if self.d == 1 and points.ndim >= 0:
                points = points[..., None]
            else:
                raise ValueError(f"points must have trailing dimension {self.d}")
        out = np.zeros(points.shape[:-1], dtype=complex)
        for (powers, factors), coeff in self.terms.items():
            val = np.full(points.shape[:-1], coeff, dtype=complex)
            for j, p in enumerate(powers):
                if p:
                    val = val * points[..., j] ** p
            for f in factors:
                val = val * self._eval_factor(f, points)
            out += val
        return out

    def __call__(self, points) -> np.ndarray:
        return self.evaluate(points)

    @staticmethod
    def _eval_factor(f, points) -> np.ndarray:
        if isinstance(f, ExpFactor):
            return np.exp(f.poly.eval(points))
        if isinstance(f, BesselFactor):
            u = f.poly.eval(points)
            if np.max(np.abs(u.imag)) > 1e-12 * max(1.0, np.max(np.abs(u))):
                raise ValueError("Bessel factor argument must evaluate real")
            return btilde(f.alpha, u.real).astype(complex)
        if isinstance(f, IndicatorFactor):
            if f.kind == "box":
                inside = np.ones(points.shape[:-1], dtype=bool)
                for j, h in enumerate(f.params):
                    inside &= np.abs(points[..., j]) <= h
            elif f.kind == "ball":
                inside = np.sum(points**2, axis=-1) <= f.params[0] ** 2
            else:
                r2 = np.sum(points**2, axis=-1)
                inside = (f.params[0] ** 2 <= r2) & (r2 <= f.params[1] ** 2)
            return inside.astype(float)
        raise TypeError(f"unknown factor {f!r}")

    # -- structural queries ---------------------------------------------------

    def parity_in(self, j: int):
        """'even', 'odd', or None when the structure decides neither."""
        all_even = True
        all_odd = True
        for (powers, factors), _ in self.terms.items():
            feven = all(
                f.poly.is_even_in(j) if isinstance(f, (ExpFactor, BesselFactor)) else True
                for f in factors
            )
            if not feven:
                return None
            if powers[j] % 2 == 0:
                all_odd = False
            else:
                all_even = False
        if all_even:
            return "even"
        if all_odd:
            return "odd"
        return None

    def is_radial(self) -> bool:
        """Structurally radial: factors depend on r2 only, no bare monomials."""
        for (powers, factors), _ in self.terms.items():
            if any(p != 0 for p in powers):
                return False
            for f in factors:
                if isinstance(f, (ExpFactor, BesselFactor)):
                    if f.poly.radial_form() is None:
                        return False
                elif f.kind == "box" and self.d > 1:
                    return False
        return True

    def radial_profile(self, r) -> np.ndarray:
        """Profile values f0 with f(x) = f0(||x||); requires is_radial()."""
        if not self.is_radial():
            raise ValueError("expression is not structurally radial")
        r = np.asarray(r, dtype=float)
        pts = np.zeros(r.shape + (self.d,))
        pts[..., 0] = r
        return self.evaluate(pts)

    def breakpoints(self):
        """(per-axis lists, radial list) of indicator edges."""
        per_axis = [set() for _ in range(self.d)]
        radial = set()
        for (_, factors), _ in self.terms.items():
            for f in factors:
                if not isinstance(f, IndicatorFactor):
                    continue
                if f.kind == "box":
                    for j, h in enumerate(f.params):
                        per_axis[j].add(h)
                elif f.kind == "ball":
                    radial.add(f.params[0])
                    if self.d == 1:
                        per_axis[0].add(f.params[0])
                else:
                    radial.update(f.params)
                    if self.d == 1:
                        per_axis[0].update(f.params)
        return [sorted(s) for s in per_axis], sorted(radial)

    def as_indicator(self):
        """(coeff, kind, params) when the expression is coeff * one indicator."""
        if len(self.terms) != 1:
            return None
        ((powers, factors),) = self.terms.keys()
        if any(powers) or len(factors) != 1:
            return None
        f = factors[0]
        if not isinstance(f, IndicatorFactor):
            return None
        coeff = next(iter(self.terms.values()))
        return coeff, f.kind, f.params

    def gaussian_rate(self):
        """(coeff, rate) when the expression is coeff * exp(-rate * r2)."""
        if len(self.terms) != 1:
            return None
        ((powers, factors),) = self.terms.keys()
        if any(powers) or len(factors) != 1:
            return None
        f = factors[0]
        if not isinstance(f, ExpFactor):
            return None
        form = f.poly.radial_form()
        if form is None or form[1] != 0 or form[0].imag != 0:
            return None
        coeff = next(iter(self.terms.values()))
        return coeff, -form[0].real

    def single_bessel_terms(self):
        """For d=1: list of (coeff, power, alpha, scale) when every term is
        coeff * x^p * B_alpha(scale * x^2), scale > 0.  None otherwise.

        This is the expression class whose weighted L2 tail on [L, inf) the
        norm engine can integrate asymptotically.
        """
        if self.d != 1:
            return None
        out = []
        for (powers, factors), coeff in self.terms.items():
            if len(factors) != 1 or not isinstance(factors[0], BesselFactor):
                return None
            f = factors[0]
            pdict = f.poly.to_dict()
            if set(pdict.keys()) != {(2,)}:
                return None
            s = pdict[(2,)]
            if s.imag != 0 or s.real <= 0:
                return None
            if abs(coeff.imag) > 1e-12 * abs(coeff):
                return None
            out.append((coeff.real, powers[0], f.alpha, s.real))
        return out

    def has_gaussian_decay(self) -> bool:
        """True when every term carries exp of a negative-definite quadratic."""
        for (_, factors), _ in self.terms.items():
            ok = False
            for f in factors:
                if isinstance(f, ExpFactor):
                    quad_ok = True
                    has_quad = [False] * self.d
                    for powers, c in f.poly.to_dict().items():
                        total = sum(powers)
                        if total > 2:
                            quad_ok = False
                        if total == 2 and max(powers) == 2:
                            j = powers.index(2)
                            has_quad[j] = True
                            if c.real >= 0:
                                quad_ok = False
                    if quad_ok and all(has_quad):
                        ok = True
            if not ok:
                return False
        return True

    # -- serialization --------------------------------------------------------

    def to_text(self) -> str:
        letter = "x" if self.side == "space" else "y"
        if self.is_zero:
            body = "0"
        else:
            parts = []
            for (powers, factors) in sorted(self.terms.keys(), key=_term_sort_key):
                coeff = self.terms[(powers, factors)]
                bits = [_fmt_coeff(coeff)]
                for j, p in enumerate(powers):
                    v = f"{letter}{j + 1}"
                    if p == 1:
                        bits.append(v)
                    elif p != 0:
                        bits.append(f"{v}^{p}")
                for f in factors:
                    if isinstance(f, ExpFactor):
                        bits.append(f"exp({f.poly.to_text(letter)})")
                    elif isinstance(f, BesselFactor):
                        bits.append(f"bessel({f.alpha!r}, {f.poly.to_text(letter)})")
                    elif f.kind == "box":
                        args = ", ".join(
                            f"h{j + 1}={h!r}" for j, h in enumerate(f.params)
                        )
                        bits.append(f"indicator_box({args})")
                    elif f.kind == "ball":
                        bits.append(f"indicator_ball(r={f.params[0]!r})")
                    else:
                        bits.append(
                            f"indicator_annulus(rmin={f.params[0]!r}, rmax={f.params[1]!r})"
                        )
                parts.append("*".join(bits))
            body = " + ".join(parts)
        return f"side={self.side}; d={self.d}; body={body}"

    def __repr__(self):
        return f"FunctionExpr({self.to_text()!r})"


def _term_sort_key(key):
    powers, factors = key
    return (powers, tuple(f.sort_key() for f in factors))


# ---------------------------------------------------------------------------
# parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?"
    r"|\d+(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),=]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise ValueError(f"cannot tokenize expression at: {text[pos:pos + 20]!r}")
        pos = m.end()
        if m.lastgroup == "num":
            tokens.append(("num", float(m.group("num"))))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name")))
        else:
            tokens.append(("op", m.group("op")))
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, tokens, side, d):
        self.tokens = tokens
        self.pos = 0
        self.side = side
        self.d = d
        self.letter = "x" if side == "space" else "y"

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val = self.next()
        if kind != "op" or val != op:
            raise ValueError(f"expected {op!r}, got {val!r}")

    def parse(self) -> FunctionExpr:
        e = self.parse_expr()
        if self.peek()[0] != "end":
            raise ValueError(f"unexpected trailing token {self.peek()[1]!r}")
        return e

    def parse_expr(self):
        e = self.parse_term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            _, op = self.next()
            rhs = self.parse_term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def parse_term(self):
        e = self.parse_unary()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            _, op = self.next()
            rhs = self.parse_unary()
            e = e * rhs if op == "*" else e / rhs
        return e

    def parse_unary(self):
        if self.peek() == ("op", "-"):
            self.next()
            return -self.parse_unary()
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        if self.peek() == ("op", "^"):
            self.next()
            kind, val = self.next()
            neg = False
            if (kind, val) == ("op", "-"):
                neg = True
                kind, val = self.next()
            if kind != "num" or val != int(val):
                raise ValueError("exponent must be an integer")
            n = int(val)
            if neg:
                one = FunctionExpr.constant(self.d, 1.0, self.side)
                return one / (base**n)
            return base**n
        return base

    def parse_atom(self):
        kind, val = self.next()
        if kind == "num":
            return FunctionExpr.constant(self.d, val, self.side)
        if kind == "op" and val == "(":
            e = self.parse_expr()
            self.expect_op(")")
            return e
        if kind == "name":
            if self.peek() == ("op", "("):
                return self.parse_call(val)
            return self.parse_var(val)
        raise ValueError(f"unexpected token {val!r}")

    def parse_var(self, name):
        if name == "pi":
            return FunctionExpr.constant(self.d, math.pi, self.side)
        if name == "r2":
            return FunctionExpr.normsq(self.d, self.side)
        m = re.fullmatch(r"([xy])(\d*)", name)
        if m is None:
            raise ValueError(f"unknown name {name!r}")
        letter, idx = m.groups()
        if letter != self.letter:
            raise ValueError(
                f"variable {name!r} does not match side={self.side!r} "
                f"(use {self.letter!r} coordinates)"
            )
        j = int(idx) - 1 if idx else 0
        if not 0 <= j < self.d:
            raise ValueError(f"coordinate {name!r} out of range for d={self.d}")
        return FunctionExpr.coordinate(self.d, j, self.side)

    def parse_call(self, name):
        self.expect_op("(")
        args = []
        kwargs = {}
        if self.peek() != ("op", ")"):
            while True:
                if (
                    self.peek()[0] == "name"
                    and self.tokens[self.pos + 1] == ("op", "=")
                ):
                    _, key = self.next()
                    self.next()
                    kwargs[key] = self.parse_expr()
                else:
                    args.append(self.parse_expr())
                if self.peek() == ("op", ","):
                    self.next()
                    continue
                break
        self.expect_op(")")
        return self.apply_call(name, args, kwargs)

    @staticmethod
    def _const(e, what) -> float:
        if not e.is_constant:
            raise ValueError(f"{what} must be a constant")
        v = e.constant_value()
        if v.imag != 0:
            raise ValueError(f"{what} must be real")
        return v.real

    def apply_call(self, name, args, kwargs):
        if name == "exp":
            if kwargs or len(args) != 1:
                raise ValueError("exp takes one positional argument")
            return FunctionExpr.exp_of(args[0])
        if name == "gaussian":
            vals = args + list(kwargs.values())
            if len(vals) != 1:
                raise ValueError("gaussian takes one rate argument")
            rate = self._const(vals[0], "gaussian rate")
            return FunctionExpr.gaussian(self.d, rate, self.side)
        if name == "bessel":
            if len(args) + len(kwargs) != 2:
                raise ValueError("bessel takes (alpha, P)")
            alpha = self._const(kwargs.get("alpha", args[0] if args else None), "alpha")
            poly = kwargs.get("arg") or (args[1] if len(args) > 1 else args[0])
            return FunctionExpr.bessel(alpha, poly)
        if name == "indicator_box":
            if args and not kwargs:
                hw = [self._const(a, "box halfwidth") for a in args]
                if len(hw) == 1:
                    hw = hw * self.d
            elif "h" in kwargs:
                hw = [self._const(kwargs["h"], "box halfwidth")] * self.d
            else:
                hw = [
                    self._const(kwargs[f"h{j + 1}"], "box halfwidth")
                    for j in range(self.d)
                ]
            return FunctionExpr.indicator_box(self.d, hw, self.side)
        if name == "indicator_ball":
            vals = args + list(kwargs.values())
            if len(vals) != 1:
                raise ValueError("indicator_ball takes r")
            return FunctionExpr.indicator_ball(self.d, self._const(vals[0], "r"), self.side)
        if name == "indicator_annulus":
            if kwargs:
                rmin = self._const(kwargs["rmin"], "rmin")
                rmax = self._const(kwargs["rmax"], "rmax")
            else:
                rmin, rmax = (self._const(a, "radius") for a in args)
            return FunctionExpr.indicator_annulus(self.d, rmin, rmax, self.side)
        raise ValueError(f"unknown function {name!r}")


def from_text(text: str) -> FunctionExpr:
    """Parse a function-spec document in the documented grammar.

    Example: ``"side=frequency; d=1; body=indicator_ball(r=1)"``.
    """
    segments = []
    for chunk in text.replace("\n", ";").split(";"):
        chunk = chunk.strip()
        if chunk:
            segments.append(chunk)
    side = None
    d = None
    body = None
    for seg in segments:
        m = re.match(r"(side|d|body)\s*=\s*(.*)", seg, re.DOTALL)
        if m is None:
            raise ValueError(f"expected key=value segment, got {seg!r}")
        key, val = m.group(1), m.group(2).strip()
        if key == "side":
            if val not in ("space", "frequency"):
                raise ValueError(f"side must be space or frequency, got {val!r}")
            side = val
        elif key == "d":
            d = int(val)
        else:
            body = val
    if side is None:
        raise ValueError("missing side= header")
    if body is None:
        raise ValueError("missing body= segment")
    if d is None:
        d = 1
        for m in re.finditer(r"[xy](\d+)", body):
            d = max(d, int(m.group(1)))
    tokens = _tokenize(body)
    return _Parser(tokens, side, d).parse()
