"""Asymptotic tail integrals for weighted L2 norms of Bessel-profile sums.

Inverse transforms of compactly supported spectra decay only polynomially
(typically x^{-3/2} in d=1), so truncating their weighted L2 integral at
any feasible L loses ~1/L relative mass.  This module integrates the tail

    int_L^inf |f(x)|^2 |x|^{2 gamma} dx,
    f(x) = sum_k c_k x^{p_k} B_{alpha_k}(s_k x^2),

in closed asymptotic form: each factor B_alpha(s x^2) = j_alpha(sqrt(s) x)
is replaced by its large-argument expansion

    j_alpha(w x) = A x^{-alpha-1/2} [cos(chi) P(wx) - sin(chi) Q(wx)],
    chi = w x - alpha pi/2 - pi/4,

with P, Q the standard inverse-power series; pair products reduce to atoms
c x^{-r} {1, cos, sin}(omega x + delta), whose primitives follow from
integration by parts.  With the default truncation orders the absolute
error is ~1e-10 at w L >= 30 for the index range used here.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["tail_norm2"]

PQ_ORDER = 3  # keep inverse powers up to (wx)^{-(2*PQ_ORDER)} in P, Q
IBP_TERMS = 14  # integration-by-parts depth for oscillatory primitives


def _pq_series(alpha: float, w: float) -> tuple:
    """P and Q as {power-of-1/x: coefficient} including w scaling."""
    mu = 4.0 * alpha * alpha
    a = [1.0]
    for j in range(1, 2 * PQ_ORDER + 2):
        a.append(a[-1] * (mu - (2 * j - 1) ** 2) / (j * 8.0))
    P = {}
    Q = {}
    for m in range(0, PQ_ORDER + 1):
        k = 2 * m
        P[k] = (-1.0) ** m * a[k] / w**k
        k = 2 * m + 1
        Q[k] = (-1.0) ** m * a[k] / w**k
    return P, Q


def _series_mul(A: dict, B: dict, max_offset: int) -> dict:
    out = {}
    for i, ca in A.items():
        for j, cb in B.items():
            k = i + j
            if k <= max_offset:
                out[k] = out.get(k, 0.0) + ca * cb
    return out


def _power_tail(L: float, q: float) -> float:
    """int_L^inf x^q dx for q < -1."""
    if q >= -1.0:
        raise ValueError(f"tail exponent {q} is not integrable")
    return -(L ** (q + 1.0)) / (q + 1.0)


def _osc_tail(L: float, r: float, omega: float, delta: float, kind: str) -> float:
    """int_L^inf x^{-r} cos/sin(omega x + delta) dx by parts, omega > 0."""
    acc = 0.0 + 0.0j
    coef = 1.0
    iw = 1j * omega
    for m in range(IBP_TERMS):
        acc += coef / (iw ** (m + 1) * L ** (r + m))
        coef *= r + m
    integral = -np.exp(1j * omega * L) * acc  # int x^{-r} e^{i omega x}
    val = np.exp(1j * delta) * integral
    return float(val.real) if kind == "cos" else float(val.imag)


def _atom_value(L: float, q: float, omega: float, delta: float, kind: str) -> float:
    if abs(omega) >= 1e-12 and q >= 0.0:
        raise ValueError(f"oscillatory tail exponent {q} >= 0 does not converge")
    if abs(omega) < 1e-12:
        phase = math.cos(delta) if kind == "cos" else math.sin(delta)
        if phase == 0.0:
            return 0.0
        return phase * _power_tail(L, q)
    if omega < 0:
        if kind == "cos":
            omega, delta = -omega, -delta
        else:
            return -_osc_tail(L, -q, -omega, -delta, "sin")
    return _osc_tail(L, -q, omega, delta, kind)


def tail_norm2(terms, L: float, gamma: float) -> float:
    """Tail of the weighted squared L2 norm past L for a Bessel-term sum.

    ``terms`` is a list of (coeff, power, alpha, scale) with scale > 0,
    meaning coeff * x^power * B_alpha(scale * x^2).  Requires the
    asymptotic regime sqrt(scale) * L >= 10 and an integrable tail.
    """
    L = float(L)
    gamma = float(gamma)
    if not terms:
        return 0.0
    prepared = []
    for c, p, alpha, s in terms:
        w = math.sqrt(s)
        if w * L < 10.0:
            raise ValueError(
                f"asymptotic tail needs sqrt(scale)*L >= 10, got {w * L:.2f}"
            )
        amp = math.gamma(alpha + 1.0) * 2.0**alpha * w ** (-alpha - 0.5) * math.sqrt(
            2.0 / math.pi
        )
        P, Q = _pq_series(alpha, w)
        prepared.append((float(c), int(p), float(alpha), w, amp, P, Q))
    max_off = 2 * PQ_ORDER
    total = 0.0
    for ck, pk, ak, wk, Ak, Pk, Qk in prepared:
        for cl, pl, al, wl, Al, Pl, Ql in prepared:
            C = ck * cl * Ak * Al
            rho = pk + pl + 2.0 * gamma - (ak + al + 1.0)
            # chi_k - chi_l and chi_k + chi_l phase data
            dw, dph = wk - wl, -(ak - al) * math.pi / 2.0
            sw, sph = wk + wl, -(ak + al + 1.0) * math.pi / 2.0
            PP = _series_mul(Pk, Pl, max_off)
            PQ = _series_mul(Pk, Ql, max_off)
            QP = _series_mul(Qk, Pl, max_off)
            QQ = _series_mul(Qk, Ql, max_off)
            # cos chi_k cos chi_l = (cos D + cos S)/2, etc.
            atoms = []
            for off, co in PP.items():
                atoms.append((0.5 * co, off, dw, dph, "cos"))
                atoms.append((0.5 * co, off, sw, sph, "cos"))
            for off, co in PQ.items():
                atoms.append((-0.5 * co, off, sw, sph, "sin"))
                atoms.append((0.5 * co, off, dw, dph, "sin"))
            for off, co in QP.items():
                atoms.append((-0.5 * co, off, sw, sph, "sin"))
                atoms.append((-0.5 * co, off, dw, dph, "sin"))
            for off, co in QQ.items():
                atoms.append((0.5 * co, off, dw, dph, "cos"))
                atoms.append((-0.5 * co, off, sw, sph, "cos"))
            for co, off, omega, delta, kind in atoms:
                if co == 0.0:
                    continue
                q = rho - off
                total += C * co * _atom_value(L, q, omega, delta, kind)
    return total
