"""Exact arithmetic in F = Q_p (p odd) at bounded precision.

A scalar is stored as ``p^v * u`` with the unit ``u`` carried modulo ``p^N``
for a fixed per-context precision ``N``.  All operations are exact within
that model; additive cancellation that would eat into the last two carried
digits raises :class:`PrecisionError` instead of returning unmarked garbage.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import gmpy2


class PrecisionError(ArithmeticError):
    """Cancellation consumed the carried unit digits."""


def indistinguishable(a, b, slack: int = 8) -> bool:
    """True when a - b is zero to working precision.

    Values reached through division chains carry about N absolute digits, so
    a difference whose true value is zero can come out as exact zero, exhaust
    the carried digits, or leave noise at valuation close to N; all count.
    """
    try:
        d = a - b
    except PrecisionError:
        return True
    return d.val is None or d.val >= a.ctx.N - slack


def _vp(n: int, p: int) -> int:
    """Exact p-adic valuation of a nonzero integer."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _tonelli_shanks(a: int, p: int) -> int:
    """Square root of a quadratic residue a modulo an odd prime p."""
    a %= p
    if a == 0:
        return 0
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # write p-1 = q * 2^s with q odd
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while gmpy2.legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


@dataclass(frozen=True)
class SquareClass:
    """Element of F*/F*^2, one of the four tags 1, eps, pi, eps*pi.

    ``nonsq`` records whether the unit part is a non-residue, ``odd`` whether
    the valuation is odd.  The group law is coordinatewise xor, making the
    four tags a Klein four-group.
    """

    nonsq: bool
    odd: bool

    @property
    def tag(self) -> str:
        return {(False, False): "1", (True, False): "eps",
                (False, True): "pi", (True, True): "eps*pi"}[(self.nonsq, self.odd)]

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        return SquareClass(self.nonsq ^ other.nonsq, self.odd ^ other.odd)

    def inverse(self) -> "SquareClass":
        return self  # every class is 2-torsion

    def __repr__(self) -> str:
        return f"SquareClass({self.tag})"


SC_ONE = SquareClass(False, False)
SC_EPS = SquareClass(True, False)
SC_PI = SquareClass(False, True)
SC_EPSPI = SquareClass(True, True)
ALL_SQUARE_CLASSES = (SC_ONE, SC_EPS, SC_PI, SC_EPSPI)


class LocalFieldContext:
    """The field F = Q_p with p odd, at fixed unit precision N.

    Attributes:
        p: odd prime.
        q: residue-field cardinality (= p here).
        N: number of unit digits carried (>= 4).
        eps_int: small integer representative of the distinguished
            non-square unit; equal to -1 whenever p = 3 mod 4, otherwise the
            smallest positive non-residue.
        root: smallest primitive root mod p (fixed generator of (Z/p)*).
    """

    def __init__(self, p: int, N: int = 12):
        if p < 3 or p % 2 == 0 or not gmpy2.is_prime(p):
            raise ValueError(f"p must be an odd prime, got {p}")
        if N < 4:
            raise ValueError("precision N must be >= 4")
        self.p = int(p)
        self.q = int(p)
        self.N = int(N)
        self.pN = p ** N
        if p % 4 == 3:
            self.eps_int = -1
        else:
            e = 2
            while gmpy2.legendre(e, p) != -1:
                e += 1
            self.eps_int = e
        # fixed generator of (Z/p)* and its discrete-log table
        def _is_primitive_root(g: int) -> bool:
            n, ord_div = p - 1, set()
            d = 2
            while d * d <= n:
                if n % d == 0:
                    ord_div.add(d)
                    while n % d == 0:
                        n //= d
                d += 1
            if n > 1:
                ord_div.add(n)
            return all(pow(g, (p - 1) // r, p) != 1 for r in ord_div)

        g = 2
        while not _is_primitive_root(g):
            g += 1
        self.root = g
        self._dlog = {}
        x = 1
        for k in range(p - 1):
            self._dlog[x] = k
            x = x * g % p
        self.zero = PadicScalar(self, None, 0)
        self.one = PadicScalar(self, 0, 1)
        self.pi = PadicScalar(self, 1, 1)
        self.eps = self.scalar(self.eps_int)
        self.minus_one = self.scalar(-1)

    def __repr__(self) -> str:
        return f"LocalFieldContext(p={self.p}, N={self.N})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LocalFieldContext) and (self.p, self.N) == (other.p, other.N)

    def __hash__(self) -> int:
        return hash((self.p, self.N))

    def scalar(self, x) -> "PadicScalar":
        """Build a scalar from an int or a (num, den) rational pair."""
        if isinstance(x, PadicScalar):
            if x.ctx is not self and x.ctx != self:
                raise ValueError("context mismatch")
            return x
        if isinstance(x, tuple):
            num, den = x
            return self.scalar(num) / self.scalar(den)
        x = int(x)
        if x == 0:
            return self.zero
        v = _vp(abs(x), self.p)
        u = (x // self.p ** v) % self.pN
        return PadicScalar(self, v, u)

    def dlog(self, u: int) -> int:
        """Discrete log of a unit modulo p with respect to the fixed root."""
        return self._dlog[u % self.p]

    def class_rep_int(self, c: SquareClass) -> int:
        """Small integer representative of a square class (for residue search)."""
        r = self.eps_int if c.nonsq else 1
        return r * self.p if c.odd else r

    def class_rep(self, c: SquareClass) -> "PadicScalar":
        return self.scalar(self.class_rep_int(c))


class PadicScalar:
    """An element p^val * unit of Q_p, unit carried mod p^N.

    Zero is encoded as ``val is None``.  Instances are immutable.
    """

    __slots__ = ("ctx", "val", "unit")

    def __init__(self, ctx: LocalFieldContext, val, unit: int):
        self.ctx = ctx
        if val is None:
            self.val = None
            self.unit = 0
        else:
            unit %= ctx.pN
            if unit % ctx.p == 0:
                raise ValueError("unit part must be prime to p")
            # balanced representative, so that small negatives cancel exactly
            if unit > ctx.pN // 2:
                unit -= ctx.pN
            self.val = int(val)
            self.unit = unit

    def is_zero(self) -> bool:
        return self.val is None

    @property
    def valuation(self):
        return self.val

    def norm(self) -> float:
        """The absolute value |x| = q^{-v(x)} (0 for x = 0)."""
        return 0.0 if self.val is None else float(self.ctx.q) ** (-self.val)

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicScalar):
            return other
        return self.ctx.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        ctx = self.ctx
        v = min(self.val, other.val)
        da, db = self.val - v, other.val - v
        if da >= ctx.N:
            return other
        if db >= ctx.N:
            return self
        t = self.unit * ctx.p ** da + other.unit * ctx.p ** db
        if t == 0:
            return ctx.zero
        w = _vp(t, ctx.p)
        if t % ctx.pN == 0:
            # the canonical representatives did not cancel exactly, but all
            # carried digits did: the true value is indistinguishable from 0
            raise PrecisionError("additive cancellation exhausted precision")
        if w > ctx.N - 2:
            raise PrecisionError(
                f"cancellation left fewer than 2 significant digits (lost {w})")
        return PadicScalar(ctx, v + w, (t // ctx.p ** w) % ctx.pN)

    def __radd__(self, other):
        return self.__add__(other)

    def __neg__(self):
        if self.is_zero():
            return self
        return PadicScalar(self.ctx, self.val, -self.unit)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return self.ctx.zero
        return PadicScalar(self.ctx, self.val + other.val,
                           self.unit * other.unit % self.ctx.pN)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("division by p-adic zero")
        if self.is_zero():
            return self
        inv = int(gmpy2.invert(other.unit, self.ctx.pN))
        return PadicScalar(self.ctx, self.val - other.val,
                           self.unit * inv % self.ctx.pN)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def inverse(self):
        return self.ctx.one / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.ctx.one
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, (PadicScalar, int)):
            return NotImplemented
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        return self.val == other.val and self.unit == other.unit

    def __hash__(self):
        return hash((self.val, self.unit))

    def __repr__(self):
        if self.is_zero():
            return "PadicScalar(0)"
        return f"PadicScalar(p^{self.val} * {self.unit})"

    def unit_mod_p(self) -> int:
        if self.is_zero():
            raise ZeroDivisionError("zero scalar has no unit part")
        return self.unit % self.ctx.p

    def residue_legendre(self) -> int:
        """Legendre symbol of the unit part mod p (+1 or -1)."""
        return int(gmpy2.legendre(self.unit_mod_p(), self.ctx.p))


# -- square classes, Hilbert symbols, square roots --------------------------


def square_class_of(x: PadicScalar) -> SquareClass:
    """The class of a nonzero scalar in F*/F*^2."""
    if x.is_zero():
        raise ZeroDivisionError("zero has no square class")
    return SquareClass(x.residue_legendre() == -1, x.val % 2 == 1)


def hilbert_symbol(a: PadicScalar, b: PadicScalar) -> int:
    """Hilbert symbol (a, b): +1 iff b is a norm from F(sqrt(a)).

    Closed form for odd residue characteristic; the exhaustive norm search
    used as an independent oracle lives in :func:`hilbert_symbol_bruteforce`.
    """
    if a.is_zero() or b.is_zero():
        raise ZeroDivisionError("Hilbert symbol needs nonzero arguments")
    p = a.ctx.p
    alpha, beta = a.val, b.val
    lu = int(gmpy2.legendre(a.unit % p, p))
    lw = int(gmpy2.legendre(b.unit % p, p))
    lm1 = int(gmpy2.legendre(-1, p))
    s = (lm1 ** (alpha * beta)) * (lu ** beta) * (lw ** alpha)
    return 1 if s > 0 else -1


def hilbert_symbol_classes(ctx: LocalFieldContext, a: SquareClass, b: SquareClass) -> int:
    return hilbert_symbol(ctx.class_rep(a), ctx.class_rep(b))


@lru_cache(maxsize=None)
def _norm_search(p: int, eps_int: int, a_rep: int, b_rep: int) -> bool:
    """Exhaustive search: is b a norm from F(sqrt(a))?

    Searches x, y mod p^3 for x^2 - a y^2 = b mod p^(v(b)+2).  A hit forces
    the quotient to be a unit square by Hensel's lemma (p odd), and every
    genuine norm reduces to such a residue solution.
    """
    m3 = p ** 3
    vb = 1 if b_rep % p == 0 else 0
    mod = p ** (vb + 2)
    target = b_rep % mod
    sq = {x * x % m3 for x in range(m3)}
    aysq = {(a_rep * y * y) % m3 for y in range(m3)}
    return any((s - w) % mod == target for w in aysq for s in sq)


def hilbert_symbol_bruteforce(a: PadicScalar, b: PadicScalar) -> int:
    """Anti-hallucination oracle for the Hilbert symbol (norm-group search)."""
    ctx = a.ctx
    ca, cb = square_class_of(a), square_class_of(b)
    if ca == SC_ONE:
        return 1
    a_rep = ctx.class_rep_int(ca)
    b_rep = ctx.class_rep_int(cb)
    return 1 if _norm_search(ctx.p, ctx.eps_int, a_rep, b_rep) else -1


def padic_sqrt(x: PadicScalar):
    """Square root of x, or None when x is not a square.

    Hensel/Newton lift of a Tonelli-Shanks root mod p; unit part normalized
    to the smaller of the two lifts mod p^N.
    """
    if x.is_zero():
        raise ZeroDivisionError("sqrt of zero is not supported")
    if square_class_of(x) != SC_ONE:
        return None
    ctx = x.ctx
    p, N = ctx.p, ctx.N
    r = _tonelli_shanks(x.unit % p, p)
    k = 1
    while k < N:
        k = min(2 * k, N)
        mod = p ** k
        inv2r = int(gmpy2.invert(2 * r % mod, mod))
        r = (r + (x.unit - r * r) * inv2r) % mod
    r %= ctx.pN
    if r > ctx.pN - r:
        r = ctx.pN - r
    return PadicScalar(ctx, x.val // 2, r)
