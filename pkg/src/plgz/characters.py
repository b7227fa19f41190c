"""Characters of a p-adic field and the attached local factors.

Two kinds of characters appear: the additive character psi with conductor
equal to the ring of integers, and tamely ramified multiplicative
characters delta determined by a value at the uniformizer together with a
tame exponent modulo p-1.  From these we compute Gauss sums, the rho
factor of the multiplicative Fourier transform (from exact test-function
pairs, never from tables), the local L_0 and epsilon_0 factors, and the
averaged factors rho-tilde over the finite group F*/S_e.

Symbolic results are returned as LaurentRational: a quotient of
multivariate Laurent polynomials in formal variables standing for q^{-s}.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .padic import (
    ALL_SQUARE_CLASSES,
    LocalFieldContext,
    PadicScalar,
    SquareClass,
    hilbert_symbol,
)
from .quadform import SeGroup

TOL = 1e-9


# ---------------------------------------------------------------------------
# Laurent polynomials and their quotients
# ---------------------------------------------------------------------------

Exponent = Tuple[int, ...]


class LaurentPoly:
    """Multivariate Laurent polynomial with complex coefficients.

    Exponents may be negative.  Variables are named; arithmetic between
    polynomials in different variable sets works over the union.
    """

    __slots__ = ("vars", "coeffs")

    def __init__(self, variables: Sequence[str], coeffs: Dict[Exponent, complex]):
        self.vars = tuple(variables)
        self.coeffs = {e: complex(c) for e, c in coeffs.items() if c != 0}

    @staticmethod
    def const(c: complex, variables: Sequence[str] = ()) -> "LaurentPoly":
        z = (0,) * len(variables)
        return LaurentPoly(variables, {z: complex(c)} if c != 0 else {})

    @staticmethod
    def monomial(variables: Sequence[str], exponent: Exponent, c: complex = 1.0) -> "LaurentPoly":
        return LaurentPoly(variables, {tuple(exponent): complex(c)})

    def is_zero(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for c in self.coeffs.values())

    def _aligned(self, other: "LaurentPoly") -> Tuple["LaurentPoly", "LaurentPoly"]:
        if self.vars == other.vars:
            return self, other
        allvars = tuple(sorted(set(self.vars) | set(other.vars)))
        return self._embed(allvars), other._embed(allvars)

    def _embed(self, allvars: Tuple[str, ...]) -> "LaurentPoly":
        if self.vars == allvars:
            return self
        pos = [allvars.index(v) for v in self.vars]
        out: Dict[Exponent, complex] = {}
        for e, c in self.coeffs.items():
            ne = [0] * len(allvars)
            for i, x in zip(pos, e):
                ne[i] = x
            out[tuple(ne)] = c
        return LaurentPoly(allvars, out)

    def __add__(self, other: "PolyLike") -> "LaurentPoly":
        other = _as_poly(other, self.vars)
        a, b = self._aligned(other)
        out = dict(a.coeffs)
        for e, c in b.coeffs.items():
            out[e] = out.get(e, 0) + c
        return LaurentPoly(a.vars, out)

    def __radd__(self, other: "PolyLike") -> "LaurentPoly":
        return self.__add__(other)

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.vars, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "PolyLike") -> "LaurentPoly":
        return self + (-_as_poly(other, self.vars))

    def __rsub__(self, other: "PolyLike") -> "LaurentPoly":
        return _as_poly(other, self.vars) - self

    def __mul__(self, other: "PolyLike") -> "LaurentPoly":
        other = _as_poly(other, self.vars)
        a, b = self._aligned(other)
        out: Dict[Exponent, complex] = {}
        for e1, c1 in a.coeffs.items():
            for e2, c2 in b.coeffs.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(a.vars, out)

    def __rmul__(self, other: "PolyLike") -> "LaurentPoly":
        return self.__mul__(other)

    def evaluate(self, point: Dict[str, complex]) -> complex:
        total = 0j
        for e, c in self.coeffs.items():
            term = c
            for v, n in zip(self.vars, e):
                if n:
                    term *= point[v] ** n
            total += term
        return total

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def close_to(self, other: "LaurentPoly", tol: float = TOL) -> bool:
        diff = self - other
        scale = max(self.max_abs_coeff(), other.max_abs_coeff(), 1.0)
        return diff.max_abs_coeff() <= tol * scale

    def to_json(self) -> Dict[str, object]:
        return {
            "vars": list(self.vars),
            "coeffs": {
                ",".join(map(str, e)): [c.real, c.imag] for e, c in sorted(self.coeffs.items())
            },
        }

    def __repr__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e, c in sorted(self.coeffs.items()):
            mono = "*".join(f"{v}^{n}" for v, n in zip(self.vars, e) if n)
            parts.append(f"({c:.4g})" + ("*" + mono if mono else ""))
        return " + ".join(parts)


PolyLike = Union["LaurentPoly", complex, float, int]


def _as_poly(x: PolyLike, variables: Sequence[str]) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    return LaurentPoly.const(complex(x), variables)


class LaurentRational:
    """Quotient of Laurent polynomials; equality by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: Optional[LaurentPoly] = None):
        if den is None:
            den = LaurentPoly.const(1.0, num.vars)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        num, den = num._aligned(den)
        num, den = _normalize_fraction(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def const(c: complex, variables: Sequence[str] = ()) -> "LaurentRational":
        return LaurentRational(LaurentPoly.const(c, variables))

    @staticmethod
    def monomial(variables: Sequence[str], exponent: Exponent, c: complex = 1.0) -> "LaurentRational":
        return LaurentRational(LaurentPoly.monomial(variables, exponent, c))

    def __add__(self, other: "RationalLike") -> "LaurentRational":
        other = as_rational(other, self.num.vars)
        return LaurentRational(self.num * other.den + other.num * self.den, self.den * other.den)

    def __radd__(self, other: "RationalLike") -> "LaurentRational":
        return self.__add__(other)

    def __neg__(self) -> "LaurentRational":
        return LaurentRational(-self.num, self.den)

    def __sub__(self, other: "RationalLike") -> "LaurentRational":
        return self + (-as_rational(other, self.num.vars))

    def __rsub__(self, other: "RationalLike") -> "LaurentRational":
        return as_rational(other, self.num.vars) - self

    def __mul__(self, other: "RationalLike") -> "LaurentRational":
        other = as_rational(other, self.num.vars)
        return LaurentRational(self.num * other.num, self.den * other.den)

    def __rmul__(self, other: "RationalLike") -> "LaurentRational":
        return self.__mul__(other)

    def __truediv__(self, other: "RationalLike") -> "LaurentRational":
        other = as_rational(other, self.num.vars)
        return LaurentRational(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other: "RationalLike") -> "LaurentRational":
        return as_rational(other, self.num.vars) / self

    def inverse(self) -> "LaurentRational":
        return LaurentRational(self.den, self.num)

    def evaluate(self, point: Dict[str, complex]) -> complex:
        return self.num.evaluate(point) / self.den.evaluate(point)

    def close_to(self, other: "RationalLike", tol: float = TOL) -> bool:
        other = as_rational(other, self.num.vars)
        return (self.num * other.den).close_to(other.num * self.den, tol)

    def to_json(self) -> Dict[str, object]:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    def __repr__(self) -> str:
        return f"({self.num!r}) / ({self.den!r})"


RationalLike = Union[LaurentRational, LaurentPoly, complex, float, int]


def as_rational(x: RationalLike, variables: Sequence[str] = ()) -> LaurentRational:
    if isinstance(x, LaurentRational):
        return x
    if isinstance(x, LaurentPoly):
        return LaurentRational(x)
    return LaurentRational.const(complex(x), variables)


def _normalize_fraction(num: LaurentPoly, den: LaurentPoly) -> Tuple[LaurentPoly, LaurentPoly]:
    # Shift out the common monomial so exponents stay small, then scale the
    # denominator's lexicographically-least term to 1.
    n = len(num.vars)
    exps = list(num.coeffs) + list(den.coeffs)
    if exps and n:
        shift = tuple(min(e[i] for e in exps) for i in range(n))
        if any(shift):
            num = LaurentPoly(num.vars, {tuple(a - b for a, b in zip(e, shift)): c
                                         for e, c in num.coeffs.items()})
            den = LaurentPoly(den.vars, {tuple(a - b for a, b in zip(e, shift)): c
                                         for e, c in den.coeffs.items()})
    lead = den.coeffs[min(den.coeffs)]
    if lead != 1:
        num = LaurentPoly(num.vars, {e: c / lead for e, c in num.coeffs.items()})
        den = LaurentPoly(den.vars, {e: c / lead for e, c in den.coeffs.items()})
    return num, den


# ---------------------------------------------------------------------------
# Additive characters
# ---------------------------------------------------------------------------


class AdditiveCharacter:
    """psi^a(x) = exp(2*pi*i * frac(a*x)) with frac the p-adic fractional part.

    The base character (a = 1) is trivial on the integers and nontrivial on
    p^{-1}-integers, so its conductor is the ring of integers.
    """

    __slots__ = ("ctx", "scale")

    def __init__(self, ctx: LocalFieldContext, scale=1):
        self.ctx = ctx
        self.scale = ctx.scalar(scale)
        if self.scale.val is None:
            raise ValueError("scale must be nonzero")

    def value(self, x) -> complex:
        t = self.ctx.scalar(x) * self.scale
        if t.val is None or t.val >= 0:
            return 1.0 + 0j
        m = -t.val
        pm = self.ctx.p ** m
        u = t.unit % pm
        return cmath.exp(2j * math.pi * u / pm)

    def __repr__(self) -> str:
        return f"AdditiveCharacter(p={self.ctx.p}, scale={self.scale!r})"


# ---------------------------------------------------------------------------
# Tame multiplicative characters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TameMultChar:
    """Multiplicative character delta with conductor exponent <= 1.

    Determined by its value at the uniformizer and by its restriction to
    units, which factors through (Z/p)* and is recorded as an exponent
    t modulo p-1 relative to the context's fixed generator g:
    delta(u) = zeta^{t*dlog(u)} with zeta = exp(2*pi*i/(p-1)).
    """

    ctx: LocalFieldContext
    value_at_pi: complex
    tame_exponent: int

    def __post_init__(self):
        object.__setattr__(self, "tame_exponent", self.tame_exponent % (self.ctx.p - 1))

    @property
    def is_ramified(self) -> bool:
        return self.tame_exponent != 0

    @property
    def is_trivial(self) -> bool:
        return self.tame_exponent == 0 and abs(self.value_at_pi - 1) <= TOL

    @property
    def real_exponent(self) -> float:
        """-log_q |delta(pi)|, the real part of the character."""
        return -math.log(abs(self.value_at_pi)) / math.log(self.ctx.q)

    def value(self, x) -> complex:
        x = self.ctx.scalar(x)
        if x.val is None:
            raise ZeroDivisionError("character of zero")
        zeta = cmath.exp(2j * math.pi / (self.ctx.p - 1))
        return (self.value_at_pi ** x.val) * zeta ** (self.tame_exponent * self.ctx.dlog(x.unit_mod_p()))

    def value_class(self, c: SquareClass) -> complex:
        return self.value(self.ctx.class_rep(c))

    def value_minus_one(self) -> complex:
        return -1.0 if (self.tame_exponent * (self.ctx.p - 1) // 2) % (self.ctx.p - 1) else 1.0

    def __mul__(self, other: "TameMultChar") -> "TameMultChar":
        return TameMultChar(self.ctx, self.value_at_pi * other.value_at_pi,
                            self.tame_exponent + other.tame_exponent)

    def inverse(self) -> "TameMultChar":
        return TameMultChar(self.ctx, 1.0 / self.value_at_pi, -self.tame_exponent)

    def is_close(self, other: "TameMultChar", tol: float = TOL) -> bool:
        return (self.tame_exponent == other.tame_exponent
                and abs(self.value_at_pi - other.value_at_pi) <= tol)


def trivial_char(ctx: LocalFieldContext) -> TameMultChar:
    return TameMultChar(ctx, 1.0, 0)


def unramified_char(ctx: LocalFieldContext, w: complex) -> TameMultChar:
    return TameMultChar(ctx, w, 0)


def quadratic_char(ctx: LocalFieldContext, a: SquareClass) -> TameMultChar:
    """The character x -> (a, x) given by the quadratic Hilbert pairing."""
    ar = ctx.class_rep(a)
    w = hilbert_symbol(ar, ctx.pi)
    t = 0 if hilbert_symbol(ar, ctx.eps) == 1 else (ctx.p - 1) // 2
    return TameMultChar(ctx, complex(w), t)


def dual_characters(S: SeGroup) -> List[TameMultChar]:
    """Characters of F*/S, realized as tame characters trivial on S."""
    ctx = S.ctx
    if S.kind == "full":
        return [trivial_char(ctx)]
    if S.kind == "norm":
        # index 2: trivial and the unramified quadratic character
        return [trivial_char(ctx), unramified_char(ctx, -1.0)]
    # kind == "squares": the four quadratic characters
    half = (ctx.p - 1) // 2
    return [TameMultChar(ctx, float(w), t) for w in (1, -1) for t in (0, half)]


# ---------------------------------------------------------------------------
# Gauss sums and Tate factors
# ---------------------------------------------------------------------------


def gauss_sum(delta: TameMultChar, psi: Optional[AdditiveCharacter] = None) -> complex:
    """Sum of delta(u)*psi(u/p) over nonzero residues u; modulus sqrt(p)."""
    if not delta.is_ramified:
        raise ValueError("Gauss sum requires a ramified character")
    ctx = delta.ctx
    if psi is None:
        psi = AdditiveCharacter(ctx)
    zeta = cmath.exp(2j * math.pi / (ctx.p - 1))
    total = 0j
    for u in range(1, ctx.p):
        total += zeta ** (delta.tame_exponent * ctx.dlog(u)) * psi.value((u, ctx.p))
    return total


def _rho_in_u(delta: TameMultChar, var: str) -> LaurentRational:
    """rho(delta, s) as a rational function of u = q^{-s}.

    Computed once and for all from exact test-function pairs:

    * unramified delta: f = indicator of the integers, which is its own
      Fourier transform.  Both zeta integrals are geometric series, giving
      rho = (1 - w^{-1} q^{-1} u^{-1}) / (1 - w u) with w = delta(pi).

    * ramified delta: f = delta^{-1} * indicator of the units.  The
      untransformed integral is vol(units); the Fourier side is supported
      on valuation -1 and collapses to a single Gauss sum, giving the
      monomial rho = u^{-1} / (w * g(delta^{-1}, psi)).
    """
    ctx = delta.ctx
    w = delta.value_at_pi
    if not delta.is_ramified:
        num = LaurentPoly((var,), {(0,): 1.0, (-1,): -1.0 / (w * ctx.q)})
        den = LaurentPoly((var,), {(0,): 1.0, (1,): -w})
        return LaurentRational(num, den)
    g = gauss_sum(delta.inverse())
    return LaurentRational.monomial((var,), (-1,), 1.0 / (w * g))


def tate_rho(delta: TameMultChar, s: Optional[complex] = None,
             psi: Optional[AdditiveCharacter] = None, *,
             symbolic: bool = False, var: str = "t",
             shift: complex = 0.0, slope: int = 1):
    """The rho factor: Z(f, delta, s) = rho(delta, s) * Z(Ff, delta^{-1}, 1-s).

    Numeric when ``s`` is given; with ``symbolic=True`` returns a
    LaurentRational in ``var`` = q^{-z} where s = shift + slope*z.
    A non-default ``psi`` with scale a rescales by the exact law
    rho_a(delta, s) = delta(a)^{-1} |a|^{1/2-s} rho(delta, s)
    (self-dual measure throughout).
    """
    ctx = delta.ctx
    base = _rho_in_u(delta, var)
    scale_val = 0
    scale_delta = 1.0 + 0j
    if psi is not None and (psi.scale.val != 0 or psi.scale.unit != 1):
        a = psi.scale
        scale_val = a.val
        scale_delta = delta.value(a)
    if not symbolic:
        if s is None:
            raise ValueError("numeric evaluation needs s")
        u = ctx.q ** (-s)
        val = base.evaluate({var: u})
        if scale_val or scale_delta != 1:
            absa = float(ctx.q) ** (-scale_val)
            val *= absa ** (0.5 - s) / scale_delta
        return val
    # substitute u = q^{-shift} * t^{slope}
    factor = complex(ctx.q) ** (-shift)
    sub_num = _substitute_power(base.num, var, factor, slope)
    sub_den = _substitute_power(base.den, var, factor, slope)
    out = LaurentRational(sub_num, sub_den)
    if scale_val or scale_delta != 1:
        absa = float(ctx.q) ** (-scale_val)
        # |a|^{1/2-s} = q^{-v(a)/2} * q^{v(a)*shift} * t^{-v(a)*slope}
        c = absa ** 0.5 * complex(ctx.q) ** (scale_val * shift) / scale_delta
        out = out * LaurentRational.monomial((var,), (-scale_val * slope,), c)
    return out


def _substitute_power(poly: LaurentPoly, var: str, factor: complex, slope: int) -> LaurentPoly:
    """Replace the sole variable u by factor * var^slope."""
    out: Dict[Exponent, complex] = {}
    for e, c in poly.coeffs.items():
        n = e[0]
        ne = (n * slope,)
        out[ne] = out.get(ne, 0) + c * factor ** n
    return LaurentPoly((var,), out)


def local_factors(delta: TameMultChar, z: complex,
                  psi: Optional[AdditiveCharacter] = None) -> Tuple[complex, complex]:
    """(L_0(delta, z), epsilon_0(delta, z, psi)) with the monomial check.

    L_0 = (1 - delta(pi) q^{-z})^{-1} for unramified delta and 1 otherwise.
    epsilon_0 is solved from rho = L_0(delta, z) / (L_0(delta^{-1}, 1-z)
    * epsilon_0) and verified to be a monomial c0 * q^{-n0*z}.
    """
    ctx = delta.ctx

    def L0(d: TameMultChar, zz: complex) -> complex:
        if d.is_ramified:
            return 1.0 + 0j
        den = 1 - d.value_at_pi * ctx.q ** (-zz)
        if abs(den) <= TOL:
            raise ZeroDivisionError("z is a pole of L_0")
        return 1.0 / den

    def eps(zz: complex) -> complex:
        return L0(delta, zz) / (tate_rho(delta, zz, psi) * L0(delta.inverse(), 1 - zz))

    e1, e2 = eps(z), eps(z + 1)
    ratio = e1 / e2  # = q^{n0}
    n0 = math.log(abs(ratio)) / math.log(ctx.q)
    n0r = round(2 * n0) / 2
    c0 = e1 * ctx.q ** (n0r * z)
    resid = abs(eps(z + 0.5) - c0 * ctx.q ** (-n0r * (z + 0.5)))
    if abs(n0 - n0r) > TOL or resid > TOL * max(1.0, abs(c0)):
        raise ArithmeticError("epsilon_0 failed the monomial fit")
    return L0(delta, z), e1


def rho_tilde(delta: TameMultChar, s, x: SquareClass, S: SeGroup,
              psi: Optional[AdditiveCharacter] = None, *,
              symbolic: bool = False, var: str = "t",
              shift: complex = 0.0, slope: int = 1):
    """Average (1/|Sigma|) * sum_chi chi(x) * rho(delta*chi, s) over F*/S."""
    chars = dual_characters(S)
    xr = S.ctx.class_rep(x)
    total = None
    for chi in chars:
        term = chi.value(xr) * tate_rho(delta * chi, s, psi, symbolic=symbolic,
                                        var=var, shift=shift, slope=slope)
        total = term if total is None else total + term
    return total * (1.0 / len(chars))
