"""Schwartz-Bruhat calculus on the graded pieces V+ and V-.

Test functions are finite sums of modulated ball indicators; the class is
closed under Fourier transform, so every transform here is exact.  On top
of that we build the measure normalizer lambda (from the explicit matrix
of the theta map at the base point), exact one-dimensional zeta integrals
as rational functions of q^{-s}, census-stratified evaluation of the
graded zeta integrals K^+_a, the mean functions T_f attached to a cut of
the diagonal torus, and a direct numerical check of the Weil formula for
small quadratic forms.

Coordinates on V+ use the matrix-pattern basis of the realization;
coordinates on V- use the basis dual to it with respect to the invariant
form b, so that b becomes the standard pairing and the base product of
self-dual measures is exactly self-dual for the Fourier kernel psi(b(X,Y)).
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
import os
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .padic import LocalFieldContext, PadicScalar, SquareClass
from .quadform import DiagonalForm, SeGroup
from .characters import (
    AdditiveCharacter,
    LaurentPoly,
    LaurentRational,
    TameMultChar,
    dual_characters,
)
from .realizations import (
    GradedElement,
    RealizationContext,
    _chop,
    _safe_add,
    _safe_sub,
    _is_zero,
    bracket,
    mat_add,
    mat_scal,
)
from .weil import weil_gamma

CENSUS_BUDGET = 300_000_000
GRID_BUDGET = 4_000_000
TOL = 1e-9


class SchwartzError(ValueError):
    pass


# ---------------------------------------------------------------------------
# scalar (de)serialization and small p-adic linear algebra
# ---------------------------------------------------------------------------


def _scalar_str(x: PadicScalar) -> str:
    if x.val is None:
        return "0"
    return f"p^{x.val}*{x.unit}"


def _scalar_parse(ctx: LocalFieldContext, s: str) -> PadicScalar:
    if s == "0":
        return ctx.zero
    head, unit = s.split("*")
    v = int(head[2:])
    return PadicScalar(ctx, v, int(unit))


def _ps_inverse(ctx: LocalFieldContext, M: Sequence[Sequence[PadicScalar]]):
    """Inverse of a square PadicScalar matrix by Gauss-Jordan elimination."""
    size = len(M)
    m = [list(row) + [ctx.one if i == j else ctx.zero for j in range(size)]
         for i, row in enumerate(M)]
    for col in range(size):
        piv = None
        best = None
        for r in range(col, size):
            if not _is_zero(m[r][col]):
                if best is None or m[r][col].val < best:
                    piv, best = r, m[r][col].val
        if piv is None:
            raise SchwartzError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        inv = ctx.one / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(size):
            if r != col and not _is_zero(m[r][col]):
                f = m[r][col]
                m[r] = [_safe_sub(x, f * y) for x, y in zip(m[r], m[col])]
    return [row[size:] for row in m]


def _ps_det(ctx: LocalFieldContext, M: Sequence[Sequence[PadicScalar]]) -> PadicScalar:
    m = [list(row) for row in M]
    size = len(m)
    det = ctx.one
    for col in range(size):
        piv = None
        for r in range(col, size):
            if not _is_zero(m[r][col]):
                piv = r
                break
        if piv is None:
            return ctx.zero
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det = det * m[col][col]
        inv = ctx.one / m[col][col]
        for r in range(col + 1, size):
            if _is_zero(m[r][col]):
                continue
            f = m[r][col] * inv
            for c in range(col, size):
                m[r][c] = _safe_sub(m[r][c], f * m[col][c])
    return det


def _dot(xs: Sequence[PadicScalar], ys: Sequence[PadicScalar]) -> PadicScalar:
    acc = None
    for x, y in zip(xs, ys):
        t = x * y
        acc = t if acc is None else _safe_add(acc, t)
    return acc


# ---------------------------------------------------------------------------
# coordinate charts
# ---------------------------------------------------------------------------


class Chart:
    """Dual coordinate systems on V+ and V- for one realization.

    The V+ coordinates read off the matrix-pattern basis.  The V- basis is
    corrected by the inverse Gram matrix of b so that b(X, Y) is the
    standard dot product of the coordinate vectors.
    """

    def __init__(self, R: RealizationContext):
        self.R = R
        self.ctx = R.ctx
        self.dim = R.dim_vplus
        self._specs = self._make_specs()
        G = [[R.b_form(R.big(GradedElement("V+", mi)),
                       R.big(GradedElement("V-", mj)))
              for mj in R._vplus_basis] for mi in R._vplus_basis]
        self.gram = G
        Ginv = _ps_inverse(self.ctx, G)
        self.gram_inv = Ginv
        self._minus_payloads = []
        for j in range(self.dim):
            pay = R.zeros(R.n, R.n)
            for i in range(self.dim):
                s = R.scalar(Ginv[i][j])
                pat = R._vplus_basis[i]
                for r in range(R.n):
                    for c in range(R.n):
                        if not _is_zero(pat[r][c]):
                            pay[r][c] = _safe_add(pay[r][c], s * pat[r][c])
            self._minus_payloads.append(pay)

    def _make_specs(self):
        # mirror the ordering of the realization's V+ basis
        R, n = self.R, self.R.n
        specs = []
        if R.family == "GL":
            for i in range(n):
                for j in range(n):
                    specs.append(("f", i, j))
        elif R.family == "SP":
            for i in range(n):
                specs.append(("f", i, i))
            for i in range(n):
                for j in range(i + 1, n):
                    specs.append(("f", i, j))
        else:
            for i in range(n):
                specs.append(("f", i, i))
            for i in range(n):
                for j in range(i + 1, n):
                    specs.append(("f", i, j))
                    specs.append(("s", i, j))
        return specs

    def _raw_coords(self, payload) -> List[PadicScalar]:
        R = self.R
        out = []
        for kind, i, j in self._specs:
            if kind == "f":
                out.append(R.f_part(payload[i][j]))
            else:
                out.append(R.s_part(payload[i][j]))
        return out

    def coords_plus(self, Z: GradedElement) -> List[PadicScalar]:
        if Z.side != "V+":
            raise SchwartzError("chart mismatch: expected a V+ element")
        return self._raw_coords(Z.payload)

    def coords_minus(self, Z: GradedElement) -> List[PadicScalar]:
        if Z.side != "V-":
            raise SchwartzError("chart mismatch: expected a V- element")
        r = self._raw_coords(Z.payload)
        return [_dot(row, r) for row in self.gram]

    def payload_plus(self, coords: Sequence[PadicScalar]):
        R = self.R
        pay = R.zeros(R.n, R.n)
        for x, pat in zip(coords, R._vplus_basis):
            s = R.scalar(x)
            for r in range(R.n):
                for c in range(R.n):
                    if not _is_zero(pat[r][c]):
                        pay[r][c] = _safe_add(pay[r][c], s * pat[r][c])
        return pay

    def payload_minus(self, coords: Sequence[PadicScalar]):
        R = self.R
        pay = R.zeros(R.n, R.n)
        for y, base in zip(coords, self._minus_payloads):
            s = R.scalar(y)
            for r in range(R.n):
                for c in range(R.n):
                    if not _is_zero(base[r][c]):
                        pay[r][c] = _safe_add(pay[r][c], s * base[r][c])
        return pay

    def plus(self, coords) -> GradedElement:
        return GradedElement("V+", self.payload_plus(coords))

    def minus(self, coords) -> GradedElement:
        return GradedElement("V-", self.payload_minus(coords))


# ---------------------------------------------------------------------------
# ball functions
# ---------------------------------------------------------------------------


class BallFunction:
    """Finite sum of modulated ball indicators on F^dim.

    Each term is (center, level, modulation, coeff) and contributes
    coeff * 1_{center + p^level O^dim}(x) * psi(<x, modulation>).
    """

    __slots__ = ("ctx", "dim", "terms", "side")

    def __init__(self, ctx: LocalFieldContext, dim: int, terms, side: str = "V+"):
        self.ctx = ctx
        self.dim = dim
        self.side = side
        norm = []
        for cen, lev, mod, coeff in terms:
            cen = tuple(ctx.scalar(c) for c in cen)
            mod = tuple(ctx.scalar(y) for y in mod)
            if len(cen) != dim or len(mod) != dim:
                raise SchwartzError("term dimension mismatch")
            norm.append((cen, int(lev), mod, complex(coeff)))
        self.terms = norm

    @staticmethod
    def lattice(ctx: LocalFieldContext, dim: int, level: int = 0,
                center=None, coeff: complex = 1.0, side: str = "V+") -> "BallFunction":
        if center is None:
            center = (0,) * dim
        return BallFunction(ctx, dim, [(center, level, (0,) * dim, coeff)], side)

    def _psi(self, psi: Optional[AdditiveCharacter]) -> AdditiveCharacter:
        return psi if psi is not None else AdditiveCharacter(self.ctx)

    def value(self, x, psi: Optional[AdditiveCharacter] = None) -> complex:
        psi = self._psi(psi)
        x = [self.ctx.scalar(t) for t in x]
        total = 0j
        for cen, lev, mod, coeff in self.terms:
            inside = True
            for xi, ci in zip(x, cen):
                try:
                    d = xi - ci
                except ArithmeticError:
                    continue  # exact cancellation: inside
                if d.val is not None and d.val < lev:
                    inside = False
                    break
            if inside:
                total += coeff * psi.value(_dot(x, mod))
        return total

    def integral(self, psi: Optional[AdditiveCharacter] = None) -> complex:
        psi = self._psi(psi)
        q = float(self.ctx.q)
        total = 0j
        for cen, lev, mod, coeff in self.terms:
            if any(y.val is not None and y.val < -lev for y in mod):
                continue
            total += coeff * psi.value(_dot(cen, mod)) * q ** (-lev * self.dim)
        return total

    def fourier(self, psi: Optional[AdditiveCharacter] = None,
                scale: complex = 1.0) -> "BallFunction":
        """Exact transform for the kernel psi(<x, y>) and self-dual measure."""
        psi = self._psi(psi)
        q = float(self.ctx.q)
        out = []
        for cen, lev, mod, coeff in self.terms:
            c2 = tuple(-y for y in mod)
            y2 = cen
            k2 = coeff * scale * q ** (-lev * self.dim) * psi.value(_dot(cen, mod))
            out.append((c2, -lev, y2, k2))
        flip = "V-" if self.side == "V+" else "V+"
        return BallFunction(self.ctx, self.dim, out, flip)

    def neg_arg(self) -> "BallFunction":
        return BallFunction(self.ctx, self.dim,
                            [(tuple(-c for c in cen), lev, tuple(-y for y in mod), k)
                             for cen, lev, mod, k in self.terms], self.side)

    def translate(self, a, psi: Optional[AdditiveCharacter] = None) -> "BallFunction":
        """f(x - a)."""
        psi = self._psi(psi)
        a = [self.ctx.scalar(t) for t in a]
        out = []
        for cen, lev, mod, coeff in self.terms:
            k2 = coeff * psi.value(-_dot(a, mod))
            out.append((tuple(c + t for c, t in zip(cen, a)), lev, mod, k2))
        return BallFunction(self.ctx, self.dim, out, self.side)

    def scale_arg(self, c) -> "BallFunction":
        """f(c x) for a nonzero scalar c."""
        c = self.ctx.scalar(c)
        if c.val is None:
            raise SchwartzError("scale must be nonzero")
        cinv = self.ctx.one / c
        out = [(tuple(cinv * t for t in cen), lev - c.val,
                tuple(c * y for y in mod), k)
               for cen, lev, mod, k in self.terms]
        return BallFunction(self.ctx, self.dim, out, self.side)

    def __add__(self, other: "BallFunction") -> "BallFunction":
        if (other.ctx != self.ctx or other.dim != self.dim
                or other.side != self.side):
            raise SchwartzError("incompatible ball functions")
        return BallFunction(self.ctx, self.dim, self.terms + other.terms, self.side)

    def __rmul__(self, c: complex) -> "BallFunction":
        return BallFunction(self.ctx, self.dim,
                            [(cen, lev, mod, k * c) for cen, lev, mod, k in self.terms],
                            self.side)

    def const_scale(self) -> int:
        """A level at which every term is locally constant."""
        m = 0
        for cen, lev, mod, _ in self.terms:
            m = max(m, lev)
            for y in mod:
                if y.val is not None:
                    m = max(m, -y.val)
        return m

    def support_min_val(self, coord: Optional[int] = None) -> int:
        """Lower bound for the valuation of coordinate(s) on the support."""
        vals = []
        for cen, lev, _, _ in self.terms:
            rng = range(self.dim) if coord is None else (coord,)
            for i in rng:
                v = cen[i].val
                vals.append(lev if v is None else min(v, lev))
        if not vals:
            return 0
        return min(vals)

    def canonical(self, psi: Optional[AdditiveCharacter] = None,
                  tol: float = TOL) -> Dict[tuple, complex]:
        """Merge terms sharing (level, ball coset, reduced modulation).

        The center is reduced modulo p^level and the modulation modulo
        p^{-level}; the removed part of the modulation is constant on the
        ball and folds into the coefficient.
        """
        psi = self._psi(psi)
        p = self.ctx.p
        merged: Dict[tuple, complex] = {}
        for cen, lev, mod, coeff in self.terms:
            ckey, ykey = [], []
            extra = 1.0 + 0j
            cred = []
            for ci in cen:
                if ci.val is None or ci.val >= lev:
                    ckey.append(Fraction(0))
                    cred.append(self.ctx.zero)
                else:
                    u = ci.unit % p ** (lev - ci.val)
                    ckey.append(Fraction(u) * Fraction(p) ** ci.val)
                    cred.append(self.ctx.scalar(u) * self.ctx.pi ** ci.val)
            for ci, yi in zip(cred, mod):
                if yi.val is None or yi.val >= -lev:
                    ykey.append(Fraction(0))
                    extra *= psi.value(ci * yi)
                else:
                    u = yi.unit % p ** (-lev - yi.val)
                    yred = self.ctx.scalar(u) * self.ctx.pi ** yi.val
                    ykey.append(Fraction(u) * Fraction(p) ** yi.val)
                    extra *= psi.value(ci * (yi - yred))
            key = (lev, tuple(ckey), tuple(ykey))
            merged[key] = merged.get(key, 0j) + coeff * extra
        return {k: v for k, v in merged.items() if abs(v) > tol}

    def agrees_with(self, other: "BallFunction",
                    psi: Optional[AdditiveCharacter] = None,
                    tol: float = TOL) -> bool:
        a, b = self.canonical(psi, tol=0.0), other.canonical(psi, tol=0.0)
        for k in set(a) | set(b):
            if abs(a.get(k, 0j) - b.get(k, 0j)) > tol:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "p": self.ctx.p,
            "dim": self.dim,
            "side": self.side,
            "terms": [
                {
                    "center": [_scalar_str(c) for c in cen],
                    "level": lev,
                    "modulation": [_scalar_str(y) for y in mod],
                    "coeff": [k.real, k.imag],
                }
                for cen, lev, mod, k in self.terms
            ],
        }

    @staticmethod
    def from_json(ctx: LocalFieldContext, blob: dict) -> "BallFunction":
        if blob["p"] != ctx.p:
            raise SchwartzError("context mismatch in deserialization")
        terms = [
            (
                tuple(_scalar_parse(ctx, s) for s in t["center"]),
                t["level"],
                tuple(_scalar_parse(ctx, s) for s in t["modulation"]),
                complex(t["coeff"][0], t["coeff"][1]),
            )
            for t in blob["terms"]
        ]
        return BallFunction(ctx, blob["dim"], terms, blob["side"])

    def __repr__(self) -> str:
        return f"BallFunction(dim={self.dim}, side={self.side}, {len(self.terms)} terms)"


# ---------------------------------------------------------------------------
# the theta map and the measure normalizer
# ---------------------------------------------------------------------------


def _noise_zero(x) -> bool:
    if hasattr(x, "re"):
        return _noise_zero(x.re) and _noise_zero(x.im)
    return _is_zero(_chop(x))


def theta_matrix(R: RealizationContext, X: GradedElement,
                 chart: Optional[Chart] = None) -> List[List[PadicScalar]]:
    """Matrix (V+ coords -> V- coords) of the Weyl involution
    theta_X = e^{-ad X} e^{ad Y} e^{-ad X}, with Y the sl2 completion of X.

    Exact because each ad is 3-step nilpotent; the middle sign is forced by
    [X, Y] = +H0: only with opposite inner and outer signs does the
    composite swap the two extreme graded pieces.
    """
    if chart is None:
        chart = Chart(R)
    Xb = R.big(X)
    Yb = R.big(R.iota(X))
    half = R.scalar((1, 2))

    def exp_ad(Ab, M, sign):
        t1 = bracket(Ab, M)
        t2 = bracket(Ab, t1)
        return mat_add(mat_add(M, mat_scal(R.scalar(sign), t1)),
                       mat_scal(half, t2))

    n = R.n
    cols = []
    for pat in R._vplus_basis:
        M = R.big(GradedElement("V+", pat))
        for Ab, sign in ((Xb, -1), (Yb, 1), (Xb, -1)):
            M = exp_ad(Ab, M, sign)
        for i in range(n):
            for j in range(n):
                if not (_noise_zero(M[i][n + j]) and _noise_zero(M[i][j])
                        and _noise_zero(M[n + i][n + j])):
                    raise SchwartzError("theta image escaped V-")
        pay = [[M[n + i][j] for j in range(n)] for i in range(n)]
        cols.append(chart.coords_minus(GradedElement("V-", pay)))
    return [[cols[j][i] for j in range(chart.dim)] for i in range(chart.dim)]


def theta_det(R: RealizationContext, X: GradedElement,
              chart: Optional[Chart] = None) -> PadicScalar:
    if chart is None:
        chart = Chart(R)
    return _ps_det(R.ctx, theta_matrix(R, X, chart))


def measure_normalizer(R: RealizationContext,
                       chart: Optional[Chart] = None) -> float:
    """lambda = sqrt|c| with c = det(theta at the base point I+)."""
    c = theta_det(R, R.I_plus(), chart)
    if c.val is None:
        raise SchwartzError("theta is singular at the base point")
    return float(R.ctx.q) ** (-c.val / 2.0)


class MeasureContext:
    """Chart plus the normalized measure pair (lambda dX, lambda^{-1} dY)."""

    def __init__(self, R: RealizationContext, psi: Optional[AdditiveCharacter] = None):
        self.R = R
        self.chart = Chart(R)
        self.psi = psi if psi is not None else AdditiveCharacter(R.ctx)
        self.m = Fraction(R.dim_vplus, R.kappa * (R.k + 1))
        self.c = theta_det(R, R.I_plus(), self.chart)
        self.lam = float(R.ctx.q) ** (-self.c.val / 2.0)

    def fourier(self, f: BallFunction) -> BallFunction:
        if f.dim != self.chart.dim:
            raise SchwartzError("chart mismatch")
        scale = self.lam if f.side == "V+" else 1.0 / self.lam
        return f.fourier(psi=self.psi, scale=scale)

    def __repr__(self) -> str:
        return (f"MeasureContext({self.R.family}, n={self.R.n}, "
                f"p={self.R.ctx.p}, lambda={self.lam:g})")


# ---------------------------------------------------------------------------
# one-dimensional zeta integrals
# ---------------------------------------------------------------------------


def tate_zeta(f: BallFunction, delta: TameMultChar, *, var: str = "t",
              shift: complex = 0.0, slope: int = 1,
              psi: Optional[AdditiveCharacter] = None) -> LaurentRational:
    """Exact integral of f(t) |t|^s delta(t) as a rational function of
    var = q^{-z} where s = shift + slope*z.

    Each ball term is cut into valuation shells: on shells deep enough the
    modulation is constant and the sum is geometric; finitely many boundary
    shells are finite sums over unit residues.
    """
    if f.dim != 1:
        raise SchwartzError("tate_zeta needs a one-dimensional function")
    ctx = f.ctx
    psi = psi if psi is not None else AdditiveCharacter(ctx)
    q = float(ctx.q)
    qc = complex(ctx.q)
    total = LaurentRational.const(0j, (var,))
    for cen, lev, mod, coeff in f.terms:
        c, y = cen[0], mod[0]
        w = y.val  # None means no modulation
        if c.val is not None and c.val < lev:
            # ball away from 0: |t|, delta and the class are constant on it
            if w is not None and w < -lev:
                continue
            v0 = c.val
            k2 = (coeff * delta.value(c) * psi.value(c * y)
                  * q ** (-lev) * qc ** (-v0 * shift))
            total = total + LaurentRational.monomial((var,), (v0 * slope,), k2)
            continue
        # ball centered at 0: shells v >= lev
        v_geo = lev if w is None else max(lev, -w)
        for v in range(lev, v_geo):
            ell = -(v + w)
            pl = ctx.p ** ell
            if pl > 1_000_000:
                raise SchwartzError("modulation too deep for exact shell sums")
            acc = 0j
            piv = ctx.pi ** v
            for u in range(1, pl):
                if u % ctx.p == 0:
                    continue
                t = ctx.scalar(u) * piv
                acc += delta.value(t) * psi.value(t * y)
            k2 = coeff * acc * q ** (-(v + ell)) * qc ** (-v * shift)
            if abs(k2) > 1e-15:
                total = total + LaurentRational.monomial((var,), (v * slope,), k2)
        if delta.is_ramified:
            continue  # unit average vanishes on every deep shell
        r = delta.value_at_pi / q * qc ** (-shift)
        num = LaurentPoly.monomial((var,), (v_geo * slope,),
                                   coeff * (1.0 - 1.0 / q) * r ** v_geo)
        den = LaurentPoly((var,), {(0,): 1.0, (slope,): -r})
        total = total + LaurentRational(num, den)
    return total


def tate_zeta_strat(f: BallFunction, delta: TameMultChar, a: SquareClass,
                    S: SeGroup, *, var: str = "t", shift: complex = 0.0,
                    slope: int = 1,
                    psi: Optional[AdditiveCharacter] = None) -> LaurentRational:
    """Integral restricted to {t : class(t a) in S}, by character averaging:
    the indicator of S in F*/S is (1/|F*/S|) sum_chi chi."""
    chars = dual_characters(S)
    total = None
    for chi in chars:
        term = chi.value_class(a) * tate_zeta(f, delta * chi, var=var,
                                              shift=shift, slope=slope, psi=psi)
        total = term if total is None else total + term
    return total * (1.0 / len(chars))


# ---------------------------------------------------------------------------
# census-stratified graded zeta integrals
# ---------------------------------------------------------------------------


def _entry_combos(R: RealizationContext, side: str = "V+",
                  chart: Optional[Chart] = None):
    """payload entry (i,j) -> [(coordinate index, multiplier)].

    On V+ the multipliers are all 1 (matrix-pattern basis); on V- they are
    the entries of the b-dual basis payloads and must be p-integral for the
    census arithmetic to stay exact.
    """
    if R.hermitian and R.n > 1:
        raise SchwartzError("census is implemented for F-valued payloads only")
    pats = R._vplus_basis if side == "V+" else chart._minus_payloads
    combos: Dict[Tuple[int, int], List[Tuple[int, PadicScalar]]] = {}
    for idx, pat in enumerate(pats):
        for i in range(R.n):
            for j in range(R.n):
                if not _is_zero(pat[i][j]):
                    if pat[i][j].val < 0:
                        raise SchwartzError(
                            "dual basis has a non-integral entry; census unavailable")
                    combos.setdefault((i, j), []).append((idx, pat[i][j]))
    return combos


_census_memo: Dict[tuple, tuple] = {}


def _census_remember(key, value):
    if len(_census_memo) > 64:
        _census_memo.clear()
    _census_memo[key] = value


def _minor_det_mod(rows, pW):
    size = len(rows)
    if size == 1:
        return rows[0][0] % pW
    if size == 2:
        return (rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]) % pW
    acc = 0
    for t in range(size):
        sub = [[row[c] for c in range(size) if c != t] for row in rows[1:]]
        term = (rows[0][t] * _minor_det_mod(sub, pW)) % pW
        acc = acc - term if t % 2 else acc + term
    return acc % pW


def default_depth(p: int) -> int:
    return {3: 4, 5: 3}.get(p, 3)


def census_strata(R: RealizationContext, V: int, level: int = 0,
                  center_ints: Optional[Sequence[int]] = None,
                  modulation: Optional[Sequence[PadicScalar]] = None,
                  side: str = "V+", chart: Optional[Chart] = None):
    """Exhaustive stratification of the ball center + p^level O^dim.

    Returns (strata, deep, total): strata maps
    (valuations of the minors capped at V, unit residues mod p) to the
    number of residue cells mod p^{V+1} -- or, when ``modulation`` y is
    given, to the exact sum of psi(<x, y>) over those cells.  deep counts
    cells where some minor is divisible by p^{V+1} (unresolved at this
    depth).  All conditions depend only on the residue mod p^{level+V+1},
    so the counts are exact.

    On side "V+" the minors are the leading principal ones of the payload
    (Delta_j); on side "V-" the payload is assembled from the b-dual basis
    (``chart`` required) and the trailing principal minors (nabla_j) are
    used instead.
    """
    ctx, p = R.ctx, R.ctx.p
    D = R.dim_vplus
    if level < 0:
        raise SchwartzError("census needs an integral support lattice")
    if side not in ("V+", "V-"):
        raise SchwartzError(f"unknown side {side!r}")
    if side == "V-" and chart is None:
        raise SchwartzError("the V- census needs the chart")
    W = level + V + 1
    pW = p ** W
    if pW * pW >= 2 ** 62:
        raise SchwartzError("census depth overflows exact integer arithmetic")
    Pc = p ** (V + 1)
    total = Pc ** D
    if total > CENSUS_BUDGET:
        raise SchwartzError("census budget exceeded")
    mod_ints = None
    if modulation is not None:
        mod_ints = []
        for y in modulation:
            if y.val is None:
                mod_ints.append(0)
            elif y.val < -W:
                raise SchwartzError("modulation oscillates below census depth")
            else:
                # the integer y * p^W mod p^W; <x,y> mod 1 needs x mod p^W only
                mod_ints.append((y.unit * pow(p, y.val + W, pW)) % pW)
        if not any(mod_ints):
            mod_ints = None
    memo_key = (R.family, R.n, p, V, level,
                tuple(center_ints) if center_ints is not None else None,
                tuple(mod_ints) if mod_ints is not None else None, side)
    if memo_key in _census_memo:
        return _census_memo[memo_key]
    plain = center_ints is None or not any(center_ints)
    cache_path = None
    cache_dir = os.environ.get("PLGZ_CACHE")
    if plain and level == 0 and mod_ints is None and side == "V+" and cache_dir:
        cache_path = os.path.join(
            cache_dir, f"census-{R.family}{R.n}-p{p}-V{V}.json")
        if os.path.exists(cache_path):
            with open(cache_path) as fh:
                blob = json.load(fh)
            strata = {(tuple(e[0]), tuple(e[1])): e[2] for e in blob["strata"]}
            _census_remember(memo_key, (strata, blob["deep"], blob["total"]))
            return strata, blob["deep"], blob["total"]
    if center_ints is None:
        center_ints = [0] * D
    combos = _entry_combos(R, side, chart)

    def mult_int(x: PadicScalar) -> int:
        return (x.unit * pow(p, x.val, pW)) % pW

    nblk = 0
    while Pc ** (D - nblk) > GRID_BUDGET:
        nblk += 1
    free = D - nblk
    base = np.arange(Pc ** free, dtype=np.int64)
    free_digits = [(base // Pc ** t) % Pc for t in range(free)]

    strata: Dict[tuple, complex] = {}
    deep_count = 0
    pm = p ** level
    sizes = [R.n - j for j in range(R.n)]
    for fixed in itertools.product(range(Pc), repeat=nblk):
        coords = []
        for idx in range(D):
            t = np.int64(fixed[idx]) if idx < nblk else free_digits[idx - nblk]
            coords.append((center_ints[idx] + pm * t) % pW)
        entries = [[0] * R.n for _ in range(R.n)]
        for (i, j), terms in combos.items():
            acc = 0
            for idx, m in terms:
                acc = (acc + coords[idx] * mult_int(m)) % pW
            entries[i][j] = acc
        deltas = []
        for size in sizes:
            off = 0 if side == "V+" else R.n - size
            rows = [[entries[off + i][off + j] for j in range(size)]
                    for i in range(size)]
            deltas.append(_minor_det_mod(rows, pW))
        key = np.int64(0)
        deep = np.zeros(base.shape, dtype=bool)
        vs_rs = []
        for dlt in deltas:
            rem = np.asarray(dlt, dtype=np.int64) + np.zeros_like(deep, dtype=np.int64)
            vj = np.zeros_like(rem)
            for _ in range(V + 1):
                mdiv = rem % p == 0
                rem = np.where(mdiv, rem // p, rem)
                vj = vj + mdiv
            deep = deep | (vj > V)
            vs_rs.append((vj, rem % p))
        for vj, rj in vs_rs:
            key = key * (V + 2) + vj
            key = key * p + rj
        key = np.where(deep, np.int64(-1), key)
        key = np.atleast_1d(key)
        if mod_ints is None:
            uniq, counts = np.unique(key, return_counts=True)
            sums = counts
        else:
            phase_idx = np.zeros_like(key)
            for c, y in zip(coords, mod_ints):
                if y:
                    phase_idx = (phase_idx + np.asarray(c, dtype=np.int64) * y) % pW
            w = np.exp(2j * np.pi * phase_idx / pW)
            uniq, inv, counts = np.unique(key, return_inverse=True,
                                          return_counts=True)
            sums = (np.bincount(inv, weights=w.real, minlength=len(uniq))
                    + 1j * np.bincount(inv, weights=w.imag, minlength=len(uniq)))
        for kval, cnt, sm in zip(uniq.tolist(), counts.tolist(), sums.tolist()):
            if kval < 0:
                deep_count += cnt
                continue
            rs, vs = [], []
            rem = kval
            for _ in sizes:
                rem, rj = divmod(rem, p)
                rem, vj = divmod(rem, V + 2)
                rs.append(rj)
                vs.append(vj)
            skey = (tuple(reversed(vs)), tuple(reversed(rs)))
            strata[skey] = strata.get(skey, 0) + sm
    if cache_path:
        os.makedirs(cache_dir, exist_ok=True)
        blob = {"strata": [[list(k[0]), list(k[1]), c] for k, c in sorted(strata.items())],
                "deep": deep_count, "total": total}
        tmp = cache_path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(blob, fh)
        os.replace(tmp, cache_path)
    _census_remember(memo_key, (strata, deep_count, total))
    return strata, deep_count, total


def zeta_K(R: RealizationContext, f: BallFunction, a: Sequence[SquareClass],
           omega: Sequence[TameMultChar], V: Optional[int] = None,
           chart: Optional[Chart] = None) -> Tuple[LaurentPoly, dict]:
    """Truncated exact series for the graded zeta integral over the open
    piece attached to a: integrate f(X) prod_j omega_j(Delta_j) |Delta_j|^{s_j}
    over {X : class(Delta_j(X)) a_j ... a_k in S_e for all j}.

    Returns a Laurent polynomial in t_j = q^{-s_j} whose coefficients are
    exact for census depth <= V per minor, plus a tail record with the
    unresolved volume and the positivity cone in which it bounds the
    remainder.

    V- integrands (f.side == "V-") are integrated against the trailing
    minors nabla_j in the b-dual coordinates of the chart.  Modulated terms
    and fractional supports are handled exactly: a term supported on
    p^sigma * (lattice ball) with sigma < 0 is rescaled to an integral ball
    (the minors pick up sigma * deg_j on their valuations), and the phase
    psi(<x, y>) is summed exactly over each residue cell.
    """
    ctx = R.ctx
    p = ctx.p
    if V is None:
        V = default_depth(p)
    k = R.k
    if len(a) != k + 1 or len(omega) != k + 1:
        raise SchwartzError("need one class and one character per minor")
    side = f.side
    if side == "V-" and chart is None:
        chart = Chart(R)
    D = R.dim_vplus
    variables = tuple(f"t{j}" for j in range(k + 1))
    zeta = cmath.exp(2j * math.pi / (p - 1))
    # the open piece attached to a pairs its j-th minor with a suffix
    # product on V+ and with a prefix product on V-
    acc_cls = []
    run = None
    if side == "V+":
        for j in range(k, -1, -1):
            run = a[j] if run is None else run * a[j]
            acc_cls.append(run)
        acc_cls.reverse()
    else:
        for j in range(k, -1, -1):
            run = a[k - j] if run is None else run * a[k - j]
            acc_cls.append(run)
        acc_cls.reverse()
    sizes = [R.n - j for j in range(R.n)]

    coeffs: Dict[tuple, complex] = {}
    unresolved = 0.0
    support_vol = 0.0
    classified_vol = 0.0
    for cen, lev, mod, coeff in f.terms:
        cvals = [ci.val for ci in cen if ci.val is not None]
        sigma = min([0, lev] + cvals)
        lev2 = lev - sigma
        W2 = lev2 + V + 1
        pW2 = p ** W2
        cints = [0 if ci.val is None else
                 (ci.unit * p ** (ci.val - sigma)) % pW2 for ci in cen]
        scale_vol = float(ctx.q) ** (-sigma * D)
        support_vol += abs(coeff) * scale_vol * float(ctx.q) ** (-lev2 * D)
        ytilde = None
        if any(y.val is not None for y in mod):
            ytilde = [y * ctx.pi ** sigma for y in mod]
            if any(y.val is not None and y.val < -W2 for y in ytilde):
                # the phase has a full period inside every residue cell, so
                # the whole term integrates to zero against any stratum
                continue
        strata, deep, total = census_strata(R, V, lev2, cints, ytilde,
                                            side, chart)
        cellvol = scale_vol * float(ctx.q) ** (-W2 * D)
        classified_vol += abs(coeff) * cellvol * (total - deep)
        unresolved += abs(coeff) * deep * cellvol
        for (vs, rs), cnt in strata.items():
            ok = True
            w = 1.0 + 0j
            key = []
            for j in range(k + 1):
                vj = vs[j] + sigma * sizes[j]
                cls = SquareClass(ctx.dlog(rs[j]) % 2 == 1, vj % 2 == 1)
                if not R.Se.contains(cls * acc_cls[j]):
                    ok = False
                    break
                w *= (omega[j].value_at_pi ** vj
                      * zeta ** (omega[j].tame_exponent * ctx.dlog(rs[j])))
                key.append(vj)
            if not ok:
                continue
            coeffs_key = tuple(key)
            coeffs[coeffs_key] = coeffs.get(coeffs_key, 0j) + coeff * cnt * cellvol * w
    series = LaurentPoly(variables, coeffs)
    tail = {
        "unresolved_volume": unresolved,
        "depth": V,
        "cone": "Re(s_j) > 0 for all j",
        "support_volume": support_vol,
        "classified_volume": classified_vol,
    }
    return series, tail


def tail_bound(tail: dict, re_s: Sequence[float], q: int) -> float:
    """Bound the truncated remainder: on the unresolved cells some minor has
    |Delta_j| <= q^{-(V+1)} and all satisfy |Delta_j| <= 1, valid only in
    the declared cone."""
    if any(r <= 0 for r in re_s):
        raise SchwartzError("tail bound unavailable outside the cone Re(s_j) > 0")
    return tail["unresolved_volume"] * float(q) ** (-(tail["depth"] + 1) * min(re_s))


# ---------------------------------------------------------------------------
# rational reconstruction of truncated zeta series
# ---------------------------------------------------------------------------


def reconstruct_rational(series: LaurentPoly, floor: Sequence[int],
                         top: Sequence[int], *, max_factors: int = 3,
                         num_total_deg: int = 4, max_shape: int = 4,
                         max_shape_sum: int = 6, tol: float = 1e-7):
    """Fit series = N(t)/D(t), D a product of <= max_factors binomials
    1 - u t^a with componentwise 0 <= a_j <= max_shape and
    |a| <= max_shape_sum.

    The candidate denominators are searched by factor shape; for each shape
    multiset the product coefficients d_w (supported on the subset sums of
    the shapes) are solved from the linear recurrence
    sum_w d_w S[v-w] = 0 imposed at every reliable exponent v outside the
    allowed numerator region {v : sum_j (v_j - f_j) <= num_total_deg},
    where f is the componentwise minimum of the support.  Coefficients must
    be exact on the whole box floor <= v <= top (componentwise); below the
    floor the series is exactly zero.

    Returns (num, den) as exponent->coefficient dicts with den[0] = 1.
    Raises SchwartzError when no candidate denominator fits.
    """
    dims = len(series.vars)
    if len(floor) != dims or len(top) != dims:
        raise SchwartzError("floor/top must match the series arity")
    coeffs = {tuple(e): complex(c) for e, c in series.coeffs.items()}

    def S(v):
        if any(x < f for x, f in zip(v, floor)):
            return 0j
        return coeffs.get(tuple(v), 0j)

    box = list(itertools.product(*[range(f, t + 1) for f, t in zip(floor, top)]))
    scale = max([abs(S(v)) for v in box] + [1e-30])
    support = [v for v in box if abs(S(v)) > 1e-13 * scale]
    if not support:
        zero_vec = tuple(0 for _ in range(dims))
        return {}, {zero_vec: 1.0 + 0j}
    sfloor = [min(v[j] for v in support) for j in range(dims)]
    zero_vec = tuple(0 for _ in range(dims))
    shapes = [a for a in itertools.product(range(max_shape + 1), repeat=dims)
              if 0 < sum(a) <= max_shape_sum]
    candidates = []
    for nf in range(max_factors + 1):
        candidates.extend(itertools.combinations_with_replacement(shapes, nf))
    candidates.sort(key=lambda c: (len(c), sum(sum(a) for a in c)))
    def in_num_region(v):
        # possible numerator support: componentwise above the support floor
        # and of small total degree relative to it
        return (all(v[j] >= sfloor[j] for j in range(dims))
                and sum(v[j] - sfloor[j] for j in range(dims)) <= num_total_deg)

    rows = [v for v in box if not in_num_region(v)]

    for combo in candidates:
        W = {zero_vec}
        for a in combo:
            W = {w for w in W} | {tuple(x + y for x, y in zip(w, a)) for w in W}
        W = sorted(W)
        unknowns = [w for w in W if w != zero_vec]
        if len(rows) < len(unknowns) + 2:
            continue
        A = np.array([[S(tuple(x - y for x, y in zip(v, w))) for w in unknowns]
                      for v in rows], dtype=complex)
        b = np.array([-S(v) for v in rows], dtype=complex)
        if unknowns:
            sol, *_ = np.linalg.lstsq(A, b, rcond=None)
        else:
            sol = np.zeros(0, dtype=complex)
        resid = (A @ sol - b) if unknowns else -b
        if np.max(np.abs(resid)) > tol * scale:
            continue
        den = {zero_vec: 1.0 + 0j}
        for w, d in zip(unknowns, sol.tolist()):
            den[w] = d
        num = {}
        for v in box:
            if not in_num_region(v):
                continue
            val = sum(d * S(tuple(x - y for x, y in zip(v, w)))
                      for w, d in den.items())
            if abs(val) > tol * scale:
                num[tuple(v)] = val
        return num, den
    raise SchwartzError("no rational fit within the factor budget")


def eval_exp_poly(coeffs: Dict[tuple, complex], tvals: Sequence[complex]) -> complex:
    """Evaluate sum_v c_v prod_j t_j^{v_j}."""
    out = 0j
    for v, c in coeffs.items():
        term = complex(c)
        for x, e in zip(tvals, v):
            term *= x ** e
        out += term
    return out


# ---------------------------------------------------------------------------
# mean functions
# ---------------------------------------------------------------------------


def _coords_of_big(R: RealizationContext, chart: Chart, M) -> List[PadicScalar]:
    n = R.n
    pay = [[M[i][n + j] for j in range(n)] for i in range(n)]
    return chart.coords_plus(GradedElement("V+", pay))


def _min_val(rows) -> int:
    out = 0
    for row in rows:
        for x in row:
            if x.val is not None:
                out = min(out, x.val)
    return out


def mean_T(R: RealizationContext, cut: int, f: BallFunction,
           u: GradedElement, v: GradedElement, *,
           psi: Optional[AdditiveCharacter] = None,
           chart: Optional[Chart] = None) -> complex:
    """T_f at the cut: |Delta_{cut+1}(v)|^{(cut+1)d/2kappa} times the integral
    over A in K_cut(1,-1) of f(e^{ad A}(u + v)).

    The exponential is the exact three-term nilpotent expansion, so the
    integrand reduces to a polynomial map of A and the integral to a finite
    Riemann sum with certified support and constancy depths.
    """
    ctx = R.ctx
    psi = psi if psi is not None else AdditiveCharacter(ctx)
    if chart is None:
        chart = Chart(R)
    a_basis = R.k_space_basis(cut, 1, -1)
    dimA = len(a_basis)
    half = R.scalar((1, 2))

    w0 = mat_add(R.big(u), R.big(v))
    vb = R.big(v)
    base = _coords_of_big(R, chart, w0)
    lin = [_coords_of_big(R, chart, bracket(Ab, vb)) for Ab in a_basis]
    quad = [[_coords_of_big(R, chart,
                            mat_scal(half, bracket(As, bracket(At, vb))))
             for At in a_basis] for As in a_basis]
    # a_basis also has to annihilate u (grading); verify once per call
    for Ab in a_basis:
        if any(not _is_zero(x) for row in bracket(Ab, R.big(u)) for x in row):
            raise SchwartzError("u is not in the (2,0) piece of the cut")

    lin_rows = [[col[i] for col in lin] for i in range(chart.dim)]
    idx = [i for i, row in enumerate(lin_rows) if any(not _is_zero(x) for x in row)]
    if len(idx) != dimA:
        raise SchwartzError("v is not generic for this cut")
    L = [[lin_rows[i][t] for t in range(dimA)] for i in idx]
    Linv = _ps_inverse(ctx, L)
    m_inv = _min_val(Linv)
    m_lin = _min_val(L)
    m_quad = _min_val([colt for col in quad for colt in col]) if dimA else 0

    Lf = min(f.support_min_val(i) for i in idx)
    Mf = f.const_scale()
    B = max(0, -Lf + max(0, -m_inv))
    MA = max(0, Mf - m_lin, Mf + B - m_quad)
    if (ctx.p ** (B + MA)) ** dimA > GRID_BUDGET:
        raise SchwartzError("mean-function grid budget exceeded")

    pinvB = ctx.pi ** (-B)
    coords_scratch = list(base)
    total = 0j
    for digits in itertools.product(range(ctx.p ** (B + MA)), repeat=dimA):
        avals = [ctx.scalar(dg) * pinvB for dg in digits]
        for i in range(chart.dim):
            acc = base[i]
            for t in range(dimA):
                if avals[t].val is not None:
                    acc = _safe_add(acc, avals[t] * lin[t][i])
            for s in range(dimA):
                if avals[s].val is None:
                    continue
                for t in range(dimA):
                    if avals[t].val is None:
                        continue
                    acc = _safe_add(acc, avals[s] * avals[t] * quad[s][t][i])
            coords_scratch[i] = acc
        total += f.value(coords_scratch, psi)
    total *= float(ctx.q) ** (-MA * dimA)

    dlt = R.delta_j(v, cut + 1)
    if dlt.val is None:
        raise SchwartzError("v is not generic: Delta_{cut+1}(v) = 0")
    expo = Fraction((cut + 1) * R.d, 2 * R.kappa)
    return total * float(ctx.q) ** (-float(expo) * dlt.val)


# ---------------------------------------------------------------------------
# the Weil formula check
# ---------------------------------------------------------------------------


def _riemann_quadratic(h: BallFunction, alpha: Optional[Sequence[PadicScalar]],
                       qs: Sequence[PadicScalar], sign: int,
                       psi: AdditiveCharacter) -> complex:
    """Finite-sum evaluation of the oscillatory integral of
    h(alpha . A) psi(sign * sum q_i A_i^2) over A in F^r."""
    ctx = h.ctx
    r = h.dim
    Ls, Ms = [], []
    for i in range(r):
        va = 0 if alpha is None else alpha[i].val
        vq = qs[i].val
        L = h.support_min_val(i) - va
        # steps h need: h(alpha A) constant, and 2 q A h, q h^2 in the conductor
        M = max(h.const_scale() - va, -vq - L, (-vq + 1) // 2, L)
        Ls.append(L)
        Ms.append(M)
    npoints = 1
    for L, M in zip(Ls, Ms):
        npoints *= ctx.p ** (M - L)
    if npoints > GRID_BUDGET:
        raise SchwartzError("oscillatory-sum grid budget exceeded")
    cell = float(ctx.q) ** (-sum(Ms))
    ranges = [range(ctx.p ** (M - L)) for L, M in zip(Ls, Ms)]
    total = 0j
    for digits in itertools.product(*ranges):
        A = [ctx.scalar(dg) * ctx.pi ** L for dg, L in zip(digits, Ls)]
        qval = None
        for qi, Ai in zip(qs, A):
            t = qi * Ai * Ai
            qval = t if qval is None else _safe_add(qval, t)
        x = A if alpha is None else [ai * Ai for ai, Ai in zip(alpha, A)]
        hv = h.value(x, psi)
        if hv != 0:
            total += hv * psi.value(qval if sign > 0 else -qval)
    return total * cell


def weil_formula_check(Q: DiagonalForm, f: BallFunction,
                       psi: Optional[AdditiveCharacter] = None) -> float:
    """|LHS - RHS| for the identity
    int Ff(alpha(A)) psi(Q(A)) dA = C^{-1/2} gamma_psi(Q) int f(A) psi(-Q(A)) dA
    with alpha(A)_i = 2 q_i A_i and C = prod |q_i|, both sides by exact
    finite sums (self-dual measure on each coordinate).  The factor 2 is
    the polarization of Q: completing the square in int psi(qx^2 + xy) dx
    lands on psi(-y^2/(4q))."""
    ctx = Q.ctx
    if Q.rank == 0 or Q.rank > 2:
        raise SchwartzError("check implemented for ranks 1 and 2")
    if f.dim != Q.rank:
        raise SchwartzError("dimension mismatch between Q and f")
    psi = psi if psi is not None else AdditiveCharacter(ctx)
    qs = Q.coefficients()
    C = math.prod(float(ctx.q) ** (-qi.val) for qi in qs)
    gamma = weil_gamma(Q, psi).value
    g = f.fourier(psi=psi)
    two = ctx.scalar(2)
    lhs = _riemann_quadratic(g, [two * qi for qi in qs], qs, +1, psi)
    rhs = C ** -0.5 * gamma * _riemann_quadratic(f, None, qs, -1, psi)
    return abs(lhs - rhs)
