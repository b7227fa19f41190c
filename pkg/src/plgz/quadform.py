"""Quadratic forms over F = Q_p: isotropy, Witt decomposition, equivalence.

Diagonal forms are stored through the square classes of their coefficients
(class substitution preserves equivalence for diagonal forms over a field of
odd residue characteristic).  Isotropy is decided by an exhaustive residue
search with Hensel lifting; the classical invariant criteria are kept as an
independent cross-check, never as the source of truth.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from plgz.padic import (
    ALL_SQUARE_CLASSES,
    SC_EPS,
    SC_EPSPI,
    SC_ONE,
    SC_PI,
    LocalFieldContext,
    PadicScalar,
    SquareClass,
    hilbert_symbol_classes,
    square_class_of,
)


@dataclass(frozen=True)
class DiagonalForm:
    """A nondegenerate diagonal quadratic form <a_1, ..., a_n>."""

    classes: tuple  # tuple of SquareClass
    ctx: LocalFieldContext

    @staticmethod
    def from_scalars(coeffs, ctx: LocalFieldContext) -> "DiagonalForm":
        cl = []
        for c in coeffs:
            c = ctx.scalar(c)
            if c.is_zero():
                raise ValueError("diagonal coefficients must be nonzero")
            cl.append(square_class_of(c))
        return DiagonalForm(tuple(cl), ctx)

    @property
    def rank(self) -> int:
        return len(self.classes)

    @property
    def disc(self) -> SquareClass:
        d = SC_ONE
        for c in self.classes:
            d = d * c
        return d

    def coefficients(self):
        return [self.ctx.class_rep(c) for c in self.classes]

    def scale(self, t: SquareClass) -> "DiagonalForm":
        return DiagonalForm(tuple(t * c for c in self.classes), self.ctx)

    def direct_sum(self, other: "DiagonalForm") -> "DiagonalForm":
        return DiagonalForm(self.classes + other.classes, self.ctx)

    def append(self, c: SquareClass) -> "DiagonalForm":
        return DiagonalForm(self.classes + (c,), self.ctx)

    def __repr__(self):
        return "<" + ", ".join(c.tag for c in self.classes) + ">"


@dataclass(frozen=True)
class FormInvariants:
    rank: int
    disc: SquareClass
    witt_index: int
    anisotropic_kernel: DiagonalForm  # possibly of rank 0


@dataclass(frozen=True)
class SeGroup:
    """The scaling stabilizer S_e inside F*/F*^2 with coset representatives."""

    e: int
    kind: str  # full / squares / norm
    xi: Optional[SquareClass]
    sigma: tuple  # representatives of F*/S_e
    ctx: LocalFieldContext

    def contains(self, c: SquareClass) -> bool:
        if self.kind == "full":
            return True
        if self.kind == "squares":
            return c == SC_ONE
        return hilbert_symbol_classes(self.ctx, self.xi, c) == 1

    def sign_character(self, c: SquareClass) -> int:
        """The quadratic character of F*/S_e at c (trivially 1 when S_e = F*)."""
        return 1 if self.contains(c) else -1

    def coset_rep(self, c: SquareClass) -> SquareClass:
        """The unique representative in sigma of the coset c * S_e."""
        for r in self.sigma:
            if self.contains(r * c):
                return r
        raise AssertionError("sigma does not cover F*/S_e")

    @property
    def index(self) -> int:
        return len(self.sigma)


# -- isotropy: exhaustive residue search with Hensel lifting -----------------


@lru_cache(maxsize=None)
def _isotropy_counts(p: int, eps_int: int, reps: tuple) -> int:
    """Number of residue witnesses to isotropy of the class form `reps`.

    ``reps`` are small integer coefficients of valuation 0 or 1.  A witness is
    a tuple x mod p^3, counted in two Hensel regimes:

    * t = 0: sum a_i x_i^2 = 0 mod p with some unit term a_i x_i;
    * t = 1: sum = 0 mod p^3 with all terms of valuation >= 1, some term of
      valuation exactly 1.

    Either kind lifts to an exact zero in Z_p (p odd), and any primitive exact
    zero reduces to a witness, so the count is nonzero iff the form is
    isotropic.
    """
    # regime t = 0: plain count mod p, tracking whether a unit term occurred
    m1 = p
    plain = [[0] * m1, [0] * m1]   # [no unit term yet, unit term seen]
    plain[0][0] = 1
    for a in reps:
        nxt = [[0] * m1, [0] * m1]
        for x in range(p):
            term = a * x * x % p
            unit = (a % p != 0) and (x % p != 0)
            for flag in (0, 1):
                row = plain[flag]
                nf = 1 if (flag or unit) else 0
                tgt = nxt[nf]
                if not any(row):
                    continue
                for r in range(m1):
                    cnt = row[r]
                    if cnt:
                        tgt[(r + term) % m1] += cnt
        plain = nxt
    count = plain[1][0]

    # regime t = 1: count mod p^3, all terms of valuation >= 1
    m3 = p ** 3
    deep = [[0] * m3, [0] * m3]    # [no valuation-1 term yet, seen one]
    deep[0][0] = 1
    for a in reps:
        # distribution of (term mod p^3, flag, multiplicity) over x mod p^3
        # restricted to v(a x) >= 1
        dist = {}
        if a % p == 0:
            # v(a) = 1: any x; term = a x^2, flag iff x is a unit
            for x in range(p * p):
                term = a * x * x % m3
                flag = 1 if x % p != 0 else 0
                key = (term, flag)
                dist[key] = dist.get(key, 0) + p  # x mod p^3 -> p per x mod p^2
        else:
            # v(a) = 0: x = p y; term = p^2 a y^2 mod p^3, flag iff y is a unit
            for y in range(p):
                term = (p * p * a * y * y) % m3
                key = (term, 1 if y % p != 0 else 0)
                dist[key] = dist.get(key, 0) + p  # y mod p^2 -> p per y mod p
        nxt = [[0] * m3, [0] * m3]
        for (term, tf), mult in dist.items():
            for flag in (0, 1):
                row = deep[flag]
                nf = 1 if (flag or tf) else 0
                tgt = nxt[nf]
                for r in range(m3):
                    cnt = row[r]
                    if cnt:
                        tgt[(r + term) % m3] += cnt * mult
        deep = nxt
    count += deep[1][0]
    return count


def is_isotropic(f: DiagonalForm) -> bool:
    """Isotropy by exhaustive residue search (the primary decision procedure)."""
    ctx = f.ctx
    reps = tuple(sorted(ctx.class_rep_int(c) for c in f.classes))
    return _isotropy_counts(ctx.p, ctx.eps_int, reps) > 0


def is_isotropic_invariant(f: DiagonalForm) -> bool:
    """Classical invariant-based isotropy criterion (cross-check only).

    rank 1: never; rank 2: iff disc = -1 mod squares; rank 3: iff the Hasse
    symbol equals (-1, -disc); rank 4: iff disc != 1, or disc = 1 and the
    Hasse symbol equals (-1, -1); rank >= 5: always.
    """
    ctx = f.ctx
    n = f.rank
    if n <= 1:
        return False
    if n >= 5:
        return True
    minus1 = square_class_of(ctx.minus_one)
    d = f.disc
    if n == 2:
        return d == minus1
    hasse = 1
    cls = f.classes
    for i in range(n):
        for j in range(i + 1, n):
            hasse *= hilbert_symbol_classes(ctx, cls[i], cls[j])
    if n == 3:
        return hasse == hilbert_symbol_classes(ctx, minus1, minus1 * d)
    return d != SC_ONE or hasse == hilbert_symbol_classes(ctx, minus1, minus1)


def represents(f: DiagonalForm, t: SquareClass) -> bool:
    """Does f represent the square class t (over F*)?"""
    if any(c == t for c in f.classes):
        return True
    minus1 = square_class_of(f.ctx.minus_one)
    return is_isotropic(f.append(t * minus1))


def represented_classes(f: DiagonalForm) -> frozenset:
    return frozenset(t for t in ALL_SQUARE_CLASSES if represents(f, t))


# -- Witt decomposition via binary re-diagonalization moves ------------------


@lru_cache(maxsize=None)
def _witt_kernel_classes(p: int, eps_int: int, key: tuple, N: int) -> tuple:
    """(witt_index, kernel class tags) for a sorted class-tag multiset.

    Searches the re-diagonalization graph: a pair <a, b> may be replaced by
    <c, abc> for any class c it represents, and a pair with product class -1
    is a hyperbolic plane and may be removed.  Chain equivalence of diagonal
    forms makes this search complete.
    """
    ctx = LocalFieldContext(p, N)
    tag2cls = {c.tag: c for c in ALL_SQUARE_CLASSES}
    minus1 = square_class_of(ctx.minus_one)

    def canon(classes):
        return tuple(sorted(c.tag for c in classes))

    start = tuple(tag2cls[t] for t in key)
    best = None
    seen = {canon(start)}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        # strip every available hyperbolic pair first
        stripped = list(cur)
        witt = 0
        changed = True
        while changed:
            changed = False
            for i in range(len(stripped)):
                for j in range(i + 1, len(stripped)):
                    if stripped[i] * stripped[j] == minus1:
                        del stripped[j], stripped[i]
                        witt += 1
                        changed = True
                        break
                if changed:
                    break
        if witt:
            nxt = tuple(stripped)
            ck = canon(nxt)
            if ck not in seen:
                seen.add(ck)
                queue.append(nxt)
            continue
        form = DiagonalForm(cur, ctx)
        if not is_isotropic(form):
            cand = (len(cur), canon(cur))
            if best is None or cand < best:
                best = cand
            continue
        # isotropic with no visible hyperbolic pair: apply binary moves
        for i in range(len(cur)):
            for j in range(i + 1, len(cur)):
                pair = DiagonalForm((cur[i], cur[j]), ctx)
                ab = cur[i] * cur[j]
                for c in ALL_SQUARE_CLASSES:
                    if not represents(pair, c):
                        continue
                    nxt = list(cur)
                    nxt[i], nxt[j] = c, ab * c
                    nxt = tuple(nxt)
                    ck = canon(nxt)
                    if ck not in seen:
                        seen.add(ck)
                        queue.append(nxt)
    assert best is not None, "re-diagonalization search never terminated"
    return best[1]


def isotropy_and_witt(f: DiagonalForm) -> FormInvariants:
    ctx = f.ctx
    key = tuple(sorted(c.tag for c in f.classes))
    kernel_tags = _witt_kernel_classes(ctx.p, ctx.eps_int, key, ctx.N)
    tag2cls = {c.tag: c for c in ALL_SQUARE_CLASSES}
    kernel = DiagonalForm(tuple(tag2cls[t] for t in kernel_tags), ctx)
    witt = (f.rank - kernel.rank) // 2
    assert kernel.rank == 0 or not is_isotropic(kernel)
    assert kernel.rank <= 4
    return FormInvariants(f.rank, f.disc, witt, kernel)


# -- equivalence and similarity ----------------------------------------------


def _kernel_signature(k: DiagonalForm):
    if k.rank == 0:
        return (0,)
    return (k.rank, k.disc.tag, tuple(sorted(c.tag for c in represented_classes(k))))


def equivalence_signature(f: DiagonalForm):
    """Complete equivalence invariant: rank, Witt index, kernel signature."""
    inv = isotropy_and_witt(f)
    return (inv.rank, inv.witt_index, _kernel_signature(inv.anisotropic_kernel))


def form_relation(f: DiagonalForm, g: DiagonalForm) -> str:
    """'equivalent', 'similar-not-equivalent' or 'inequivalent'."""
    if equivalence_signature(f) == equivalence_signature(g):
        return "equivalent"
    for t in ALL_SQUARE_CLASSES[1:]:
        if equivalence_signature(f.scale(t)) == equivalence_signature(g):
            return "similar-not-equivalent"
    return "inequivalent"


def similarity_signature(f: DiagonalForm):
    """Canonical invariant of the similarity class (equivalence up to F* scaling)."""
    return min(equivalence_signature(f.scale(t)) for t in ALL_SQUARE_CLASSES)


# -- Gram-matrix diagonalization ---------------------------------------------


def diagonalize_gram(gram, ctx: LocalFieldContext):
    """Diagonalize a symmetric matrix of PadicScalar by congruence.

    Returns (diagonal entries with zeros trimmed, rank, witness) where
    ``witness`` is the matrix C with C G C^t diagonal.  Degenerate input is
    allowed; the trimmed rank is reported.
    """
    n = len(gram)
    g = [[ctx.scalar(x) for x in row] for row in gram]
    c = [[ctx.one if i == j else ctx.zero for j in range(n)] for i in range(n)]

    def row_op(dst, src, coef):
        # dst <- dst + coef*src, applied on both sides plus the witness
        for t in range(n):
            g[dst][t] = g[dst][t] + coef * g[src][t]
        for t in range(n):
            g[t][dst] = g[t][dst] + coef * g[t][src]
        for t in range(n):
            c[dst][t] = c[dst][t] + coef * c[src][t]

    diag = []
    for k in range(n):
        # pick a pivot of minimal valuation on the diagonal or off-diagonal
        piv = None
        for i in range(k, n):
            if not g[i][i].is_zero():
                if piv is None or g[i][i].val < piv[1]:
                    piv = (i, g[i][i].val)
        if piv is None:
            # all diagonal entries vanish; look for an off-diagonal entry
            found = None
            for i in range(k, n):
                for j in range(i + 1, n):
                    if not g[i][j].is_zero():
                        found = (i, j)
                        break
                if found:
                    break
            if found is None:
                break  # remaining block is zero
            i, j = found
            row_op(i, j, ctx.one)   # makes g[i][i] = 2 g[i][j] != 0
            piv = (i, g[i][i].val)
        i = piv[0]
        if i != k:
            g[i], g[k] = g[k], g[i]
            for t in range(n):
                g[t][i], g[t][k] = g[t][k], g[t][i]
            c[i], c[k] = c[k], c[i]
        pivval = g[k][k]
        for i in range(k + 1, n):
            if not g[i][k].is_zero():
                row_op(i, k, -(g[i][k] / pivval))
        diag.append(pivval)
    return diag, len(diag), c


def gram_to_form(gram, ctx: LocalFieldContext) -> DiagonalForm:
    diag, rank, _ = diagonalize_gram(gram, ctx)
    if rank < len(gram):
        raise ValueError("singular Gram matrix")
    return DiagonalForm.from_scalars(diag, ctx)


# -- reference forms q_e and the groups S_e ----------------------------------


def anisotropic_rank4(ctx: LocalFieldContext) -> DiagonalForm:
    return DiagonalForm((SC_ONE, SC_EPS * square_class_of(ctx.minus_one),
                         SC_PI * square_class_of(ctx.minus_one),
                         SC_EPSPI), ctx)


def build_qe_and_Se(d: int, e: int, ctx: LocalFieldContext):
    """The reference form q_e = q_an,e + (d-e)/2 hyperbolic planes, and S_e.

    Canonical anisotropic parts, all representing 1:
    e=0: empty; e=1: <1>; e=2: <1, -eps> (the norm form of the unramified
    quadratic extension E = F(sqrt(eps))); e=3: <1, -eps, -pi>;
    e=4: <1, -eps, -pi, eps*pi>.
    """
    if not (0 <= e <= 4):
        raise ValueError("e must lie in [0, 4]")
    if e > d:
        raise ValueError("e cannot exceed d")
    if (d - e) % 2 != 0:
        raise ValueError("d - e must be even")
    minus1 = square_class_of(ctx.minus_one)
    an = {
        0: (),
        1: (SC_ONE,),
        2: (SC_ONE, minus1 * SC_EPS),
        3: (SC_ONE, minus1 * SC_EPS, minus1 * SC_PI),
        4: (SC_ONE, minus1 * SC_EPS, minus1 * SC_PI, SC_EPSPI),
    }[e]
    hyp = (SC_ONE, minus1) * ((d - e) // 2)
    qe = DiagonalForm(an + hyp, ctx)
    if e in (0, 4):
        se = SeGroup(e, "full", None, (SC_ONE,), ctx)
    elif e in (1, 3):
        se = SeGroup(e, "squares", None, ALL_SQUARE_CLASSES, ctx)
    else:
        se = SeGroup(e, "norm", SC_EPS, (SC_ONE, SC_PI), ctx)
    return qe, se
