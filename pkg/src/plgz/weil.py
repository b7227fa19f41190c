"""Weil indices of quadratic characters over a p-adic field.

alpha(a) is the eighth-root-of-unity-like constant attached to x -> psi(a x^2),
computed as a stabilized normalized oscillatory sum -- never transcribed
from a table.  gamma(Q) is the product of alpha over a diagonalization, and
gamma_k packages the constants entering the graded functional equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .padic import (
    LocalFieldContext,
    PadicScalar,
    SquareClass,
    hilbert_symbol_classes,
    square_class_of,
    SC_ONE,
)
from .quadform import DiagonalForm, build_qe_and_Se
from .characters import AdditiveCharacter, quadratic_char, unramified_char

TOL = 1e-9


@dataclass(frozen=True)
class WeilIndex:
    """A modulus-one constant together with how it was obtained."""

    value: complex
    provenance: str

    def __post_init__(self):
        if abs(abs(self.value) - 1) > TOL:
            raise ValueError(f"Weil index has modulus {abs(self.value)}")

    def __mul__(self, other: "WeilIndex") -> "WeilIndex":
        return WeilIndex(self.value * other.value, self.provenance)

    def __pow__(self, n: int) -> "WeilIndex":
        return WeilIndex(self.value ** n, self.provenance)


_alpha_cache: Dict[Tuple[int, str], complex] = {}


def _oscillatory_sum(ctx: LocalFieldContext, a: PadicScalar, m: int) -> complex:
    """I_m = p^{-m} * sum over x in p^{-m}O / p^m O of psi(a x^2).

    Writing x = n p^{-m}, the summand has period p^M in n with
    M = max(2m - v(a), 0), so the double-size sum collapses to one pass
    over n mod p^M weighted by p^{2m-M}.
    """
    p, v, u = ctx.p, a.val, a.unit
    M = 2 * m - v
    if M <= 0:
        return float(p ** m)  # psi trivial on the whole window
    pM = p ** M
    n = np.arange(pM, dtype=np.int64)
    residues = (int(u % pM) * ((n * n) % pM)) % pM
    phases = np.exp(2j * np.pi * residues / pM)
    return complex(phases.sum()) * p ** (m - M)


def weil_alpha(a, psi: Optional[AdditiveCharacter] = None,
               ctx: Optional[LocalFieldContext] = None) -> WeilIndex:
    """alpha(a): normalized stabilized sum of psi(a x^2) over a growing window."""
    if ctx is None:
        if isinstance(a, PadicScalar):
            ctx = a.ctx
        elif psi is not None:
            ctx = psi.ctx
        else:
            raise ValueError("context required")
    a = ctx.scalar(a)
    if a.val is None:
        raise ValueError("alpha requires nonzero argument")
    if psi is not None:
        a = a * psi.scale
    key = (ctx.p, square_class_of(a).tag)
    if key in _alpha_cache:
        return WeilIndex(_alpha_cache[key], "gauss-oracle")
    arep = ctx.class_rep(square_class_of(a))  # alpha is a square-class invariant
    prev = None
    start = max(1, (abs(arep.val) + 2 + 1) // 2)
    for m in range(start, ctx.N):
        cur = _oscillatory_sum(ctx, arep, m)
        if prev is not None and abs(cur - prev) < TOL and abs(cur) > TOL:
            val = cur / abs(cur)
            _alpha_cache[key] = val
            return WeilIndex(val, "gauss-oracle")
        prev = cur
    raise ArithmeticError("oscillatory sum failed to stabilize")


def weil_gamma(Q: DiagonalForm, psi: Optional[AdditiveCharacter] = None) -> WeilIndex:
    """gamma(Q) = product of alpha over the diagonal coefficients."""
    if Q.rank == 0:
        return WeilIndex(1.0 + 0j, "product-formula")
    val = 1.0 + 0j
    for c in Q.coefficients():
        val *= weil_alpha(c, psi).value
    return WeilIndex(val, "product-formula")


def gamma_k(a_under: Sequence[SquareClass], c_k: SquareClass,
            e: int, d: int, k: int, ctx: LocalFieldContext,
            psi: Optional[AdditiveCharacter] = None) -> WeilIndex:
    """The constant gamma_k(a, c_k) of the degree-k functional-equation step.

    Case split on e:
      * e in {0, 4}: gamma(q_e)^k, independent of the twists;
      * e = 2: gamma(q_e)^k * w_E(c_k)^k * prod_j w_E(a_j), with w_E the
        unramified quadratic character;
      * e in {1, 3}: prod_{j<k} gamma(q_e) * ((-1)^{(d-1)/2} disc q_e, a_j c_k)
        * alpha(-a_j c_k), adjudicated against the bracket-form Weil index
        gamma(Q_{u',v}) computed in the matrix models.
    """
    if len(a_under) != k:
        raise ValueError(f"expected {k} twist entries, got {len(a_under)}")
    qe, S = build_qe_and_Se(d, e, ctx)
    for c in (*a_under, c_k):
        if c not in S.sigma:
            raise ValueError(f"class {c.tag} is not a coset representative for S_{e}")
    g = weil_gamma(qe, psi).value
    if e in (0, 4):
        val = g ** k
    elif e == 2:
        wE = unramified_char(ctx, -1.0)
        val = g ** k * wE.value_class(c_k) ** k
        for aj in a_under:
            val *= wE.value_class(aj)
    else:  # e in {1, 3}
        sign_cls = qe.disc
        if ((d - 1) // 2) % 2:
            sign_cls = sign_cls * square_class_of(ctx.minus_one)
        val = 1.0 + 0j
        for aj in a_under:
            ac = aj * c_k
            val *= (g * hilbert_symbol_classes(ctx, sign_cls, ac)
                    * weil_alpha(-ctx.class_rep(ac), psi).value)
    return WeilIndex(val, "gamma_k-formula")
