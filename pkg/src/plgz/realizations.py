"""Explicit matrix models for three graded families.

GL: sl(2n, F) with V+ = M(n, F);
SP: sp(2n, F) with V+ = Sym(n, F);
SU: su(2n, E, H) with V+ = Herm(n, E), E = F(sqrt(eps)) unramified.

All three share the block grading by H0 = diag(I, -I): elements of V+ are
upper-right blocks X(B) and elements of V- lower-left blocks Y(C).  The
grading data -- the sl2 triples (Y_j, H_j, X_j), the piece dimensions, the
normalized invariant form b, the relative invariants Delta_j / nabla_j, the
inversion iota, and the quadratic forms attached to brackets -- are all
computed from the matrices, then cross-checked against the family profile.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .padic import (
    LocalFieldContext,
    PadicScalar,
    PrecisionError,
    SquareClass,
    hilbert_symbol,
    indistinguishable,
    square_class_of,
    SC_ONE,
)
from .quadform import (
    DiagonalForm,
    SeGroup,
    build_qe_and_Se,
    diagonalize_gram,
    isotropy_and_witt,
    similarity_signature,
)
from .weil import WeilIndex, weil_gamma


# ---------------------------------------------------------------------------
# The quadratic extension E = F(sqrt(eps)) and generic matrix helpers
# ---------------------------------------------------------------------------


class EScalar:
    """An element re + im*sqrt(eps) of the unramified quadratic extension."""

    __slots__ = ("re", "im")

    def __init__(self, re: PadicScalar, im: PadicScalar):
        self.re = re
        self.im = im

    @property
    def ctx(self) -> LocalFieldContext:
        return self.re.ctx

    def is_zero(self) -> bool:
        return self.re.val is None and self.im.val is None

    def conj(self) -> "EScalar":
        return EScalar(self.re, -self.im)

    def __add__(self, o: "EScalar") -> "EScalar":
        return EScalar(_safe_add(self.re, o.re), _safe_add(self.im, o.im))

    def __sub__(self, o: "EScalar") -> "EScalar":
        return EScalar(_safe_sub(self.re, o.re), _safe_sub(self.im, o.im))

    def __neg__(self) -> "EScalar":
        return EScalar(-self.re, -self.im)

    def __mul__(self, o: "EScalar") -> "EScalar":
        eps = self.ctx.eps
        return EScalar(_safe_add(self.re * o.re, self.im * o.im * eps),
                       _safe_add(self.re * o.im, self.im * o.re))

    def inverse(self) -> "EScalar":
        nm = self.norm()
        return EScalar(self.re / nm, -(self.im / nm))

    def __truediv__(self, o: "EScalar") -> "EScalar":
        return self * o.inverse()

    def norm(self) -> PadicScalar:
        eps = self.ctx.eps
        return self.re * self.re - self.im * self.im * eps

    def __eq__(self, o) -> bool:
        return isinstance(o, EScalar) and self.re == o.re and self.im == o.im

    def __repr__(self) -> str:
        return f"({self.re!r} + {self.im!r}*s)"


def _is_zero(x) -> bool:
    if isinstance(x, EScalar):
        return x.is_zero()
    return x.val is None


def _chop(x: PadicScalar) -> PadicScalar:
    """Zero out precision noise left by a cancellation near the digit ceiling."""
    if x.val is not None and x.val >= x.ctx.N - 8:
        return x.ctx.zero
    return x


def _safe_sub(x, y):
    """x - y, mapping a full-precision cancellation to exact zero.

    Used inside eliminations and verifications, where entries were reached
    by division chains and a true zero can exhaust the carried digits.
    """
    if isinstance(x, EScalar):
        return EScalar(_safe_sub(x.re, y.re), _safe_sub(x.im, y.im))
    try:
        return _chop(x - y)
    except PrecisionError:
        return x.ctx.zero


def _diff_zero(x, y) -> bool:
    if isinstance(x, EScalar):
        return _diff_zero(x.re, y.re) and _diff_zero(x.im, y.im)
    return indistinguishable(x, y)


def _safe_add(x, y):
    if isinstance(x, EScalar):
        return EScalar(_safe_add(x.re, y.re), _safe_add(x.im, y.im))
    try:
        return _chop(x + y)
    except PrecisionError:
        return x.ctx.zero


def _conj(x):
    return x.conj() if isinstance(x, EScalar) else x


def mat_mul(a, b):
    n, m, r = len(a), len(b[0]), len(b)
    return [[_sum_prod(a[i], [b[s][j] for s in range(r)]) for j in range(m)]
            for i in range(n)]


def _sum_prod(row, col):
    acc = row[0] * col[0]
    for x, y in zip(row[1:], col[1:]):
        acc = _safe_add(acc, x * y)
    return acc


def mat_add(a, b):
    return [[_safe_add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[_safe_sub(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_neg(a):
    return [[-x for x in row] for row in a]

def mat_scal(c, a):
    return [[c * x for x in row] for row in a]


def mat_conjT(a):
    return [[_conj(a[j][i]) for j in range(len(a))] for i in range(len(a[0]))]


def bracket(a, b):
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def mat_trace(a):
    acc = a[0][0]
    for i in range(1, len(a)):
        acc = acc + a[i][i]
    return acc


# ---------------------------------------------------------------------------
# Graded elements
# ---------------------------------------------------------------------------


@dataclass
class GradedElement:
    """Payload matrix of an element of V+ or V- (the relevant n x n block)."""

    side: str  # "V+" or "V-"
    payload: List[List[object]]

    def __post_init__(self):
        if self.side not in ("V+", "V-"):
            raise ValueError("side must be 'V+' or 'V-'")


class RealizationError(ValueError):
    pass


class RealizationContext:
    """Matrix model of one graded family at size parameter n (k = n-1)."""

    def __init__(self, family: str, n: int, ctx: LocalFieldContext):
        if family not in ("GL", "SP", "SU"):
            raise RealizationError(f"unsupported family {family!r}")
        if n < 1:
            raise RealizationError("need n >= 1")
        self.family = family
        self.n = n
        self.k = n - 1
        self.ctx = ctx
        self.hermitian = family == "SU"
        # family constants matching the classification table rows
        self.ell = 1
        self.d = {"GL": 2, "SP": 1, "SU": 2}[family]
        self.e = {"GL": 0, "SP": 1, "SU": 2}[family]
        self.kappa = 1
        self.dim_vplus = n * n if family in ("GL", "SU") else n * (n + 1) // 2
        assert self.dim_vplus == n * (2 * self.ell + self.k * self.d) // 2
        self.qe, self.Se = build_qe_and_Se(self.d, self.e, ctx)
        self._zero = ctx.zero
        self._one = ctx.one
        self._vplus_basis = self._make_vplus_basis()
        self._g_basis, self._g_coords = self._make_g_basis()
        self._killing_const = self._compute_killing_const()
        kc = self._killing_const
        # b = -(k+1)/(4 dim V+) * Killing; with Killing = kc * tr_F this is
        # a single rational multiple of the trace form
        self._b_factor = Fraction(-(self.k + 1), 4 * self.dim_vplus) * kc
        self._check_gradation()

    # -- scalars ------------------------------------------------------------

    def scalar(self, x):
        """Coerce to the model's scalar ring (EScalar for the SU family)."""
        if isinstance(x, EScalar):
            return x
        if isinstance(x, tuple) and len(x) == 2 and self.hermitian \
                and isinstance(x[0], PadicScalar):
            return EScalar(x[0], x[1])
        f = self.ctx.scalar(x)
        if self.hermitian:
            return EScalar(f, self.ctx.zero)
        return f

    def zero_scalar(self):
        return self.scalar(0)

    def f_part(self, x) -> PadicScalar:
        if isinstance(x, EScalar):
            return x.re
        return x

    def s_part(self, x) -> PadicScalar:
        if isinstance(x, EScalar):
            return x.im
        return self.ctx.zero

    def sqrt_eps(self) -> "EScalar":
        return EScalar(self.ctx.zero, self.ctx.one)

    # -- block plumbing -------------------------------------------------------

    def zeros(self, r: int, c: int):
        z = self.zero_scalar()
        return [[z for _ in range(c)] for _ in range(r)]

    def unit(self, i: int, j: int, c=None):
        m = self.zeros(self.n, self.n)
        m[i][j] = self.scalar(1) if c is None else c
        return m

    def big(self, elt) -> List[List[object]]:
        """Embed a graded element (or a pair (A-block, 'g0')) into g."""
        n = self.n
        out = self.zeros(2 * n, 2 * n)
        if isinstance(elt, GradedElement):
            if elt.side == "V+":
                for i in range(n):
                    for j in range(n):
                        out[i][n + j] = elt.payload[i][j]
            else:
                for i in range(n):
                    for j in range(n):
                        out[n + i][j] = elt.payload[i][j]
            return out
        raise RealizationError("big() expects a GradedElement")

    def vplus(self, payload) -> GradedElement:
        return GradedElement("V+", [[self.scalar(x) for x in row] for row in payload])

    def vminus(self, payload) -> GradedElement:
        return GradedElement("V-", [[self.scalar(x) for x in row] for row in payload])

    def X_j(self, j: int) -> GradedElement:
        """Basis element with payload E at diagonal slot j (j=0 bottom-right)."""
        pos = self.n - 1 - j
        return GradedElement("V+", self.unit(pos, pos))

    def Y_j(self, j: int) -> GradedElement:
        pos = self.n - 1 - j
        return GradedElement("V-", self.unit(pos, pos))

    def I_plus(self, a: Optional[Sequence] = None) -> GradedElement:
        m = self.zeros(self.n, self.n)
        for j in range(self.n):
            pos = self.n - 1 - j
            m[pos][pos] = self.scalar(1 if a is None else a[j])
        return GradedElement("V+", m)

    def I_minus(self) -> GradedElement:
        m = self.zeros(self.n, self.n)
        for i in range(self.n):
            m[i][i] = self.scalar(1)
        return GradedElement("V-", m)

    def H0(self) -> List[List[object]]:
        n = self.n
        out = self.zeros(2 * n, 2 * n)
        for i in range(n):
            out[i][i] = self.scalar(1)
            out[n + i][n + i] = self.scalar(-1)
        return out

    def H_lambda(self, j: int) -> List[List[object]]:
        n = self.n
        pos = n - 1 - j
        out = self.zeros(2 * n, 2 * n)
        out[pos][pos] = self.scalar(1)
        out[n + pos][n + pos] = self.scalar(-1)
        return out

    # -- the invariant form b -------------------------------------------------

    def _make_vplus_basis(self):
        """Payload matrices of an F-basis of V+ (and, mirrored, of V-)."""
        n, out = self.n, []
        one = self.scalar(1)
        if self.family == "GL":
            for i in range(n):
                for j in range(n):
                    out.append(self.unit(i, j))
        elif self.family == "SP":
            for i in range(n):
                out.append(self.unit(i, i))
            for i in range(n):
                for j in range(i + 1, n):
                    m = self.zeros(n, n)
                    m[i][j] = m[j][i] = one
                    out.append(m)
        else:  # SU hermitian
            s = self.sqrt_eps()
            for i in range(n):
                out.append(self.unit(i, i))
            for i in range(n):
                for j in range(i + 1, n):
                    m = self.zeros(n, n)
                    m[i][j] = m[j][i] = one
                    out.append(m)
                    m2 = self.zeros(n, n)
                    m2[i][j] = s
                    m2[j][i] = -s
                    out.append(m2)
        return out

    def vplus_basis(self) -> List[GradedElement]:
        return [GradedElement("V+", m) for m in self._vplus_basis]

    def vminus_basis(self) -> List[GradedElement]:
        return [GradedElement("V-", m) for m in self._vplus_basis]

    def _make_g_basis(self):
        """Basis of g as big matrices plus a coordinate-extraction closure."""
        n = self.n
        basis = []
        specs = []  # how to read the coordinate back off a big matrix

        def emb_A(i, j, c):
            out = self.zeros(2 * n, 2 * n)
            out[i][j] = c
            if self.family == "SP":
                out[n + j][n + i] = -c
            elif self.family == "SU":
                out[n + j][n + i] = -_conj(c)
            return out

        one = self.scalar(1)
        if self.family == "GL":
            # sl(2n): off-diagonal units plus traceless diagonal differences
            for i in range(2 * n):
                for j in range(2 * n):
                    if i != j:
                        out = self.zeros(2 * n, 2 * n)
                        out[i][j] = one
                        basis.append(out)
                        specs.append(("entry", i, j, None))
            for i in range(2 * n - 1):
                out = self.zeros(2 * n, 2 * n)
                out[i][i] = one
                out[i + 1][i + 1] = -one
                basis.append(out)
                specs.append(("diagpartial", i, None, None))
        else:
            s = self.sqrt_eps() if self.hermitian else None
            for i in range(n):
                for j in range(n):
                    basis.append(emb_A(i, j, one))
                    specs.append(("entryF", i, j, None))
            if self.hermitian:
                for i in range(n):
                    for j in range(n):
                        if i != j:
                            basis.append(emb_A(i, j, s))
                            specs.append(("entryS", i, j, None))
                for i in range(n - 1):
                    basis.append(mat_sub(emb_A(i, i, s), emb_A(i + 1, i + 1, s)))
                    specs.append(("diagpartialS", i, None, None))
            for side in ("V+", "V-"):
                for m in self._vplus_basis:
                    basis.append(self.big(GradedElement(side, m)))
                    # find the defining entries of the payload pattern
                    ij = [(i, j) for i in range(n) for j in range(n)
                          if not _is_zero(m[i][j])]
                    specs.append(("block", side, ij, m))

        def coords(M) -> List[PadicScalar]:
            out = []
            for kind, a1, a2, a3 in specs:
                if kind == "entry":
                    out.append(M[a1][a2])
                elif kind == "diagpartial":
                    acc = M[0][0]
                    for t in range(1, a1 + 1):
                        acc = acc + M[t][t]
                    out.append(acc)
                elif kind == "entryF":
                    out.append(self.f_part(M[a1][a2]))
                elif kind == "entryS":
                    out.append(self.s_part(M[a1][a2]))
                elif kind == "diagpartialS":
                    acc = self.s_part(M[0][0])
                    for t in range(1, a1 + 1):
                        acc = acc + self.s_part(M[t][t])
                    out.append(acc)
                else:  # block
                    side, ij, m = a1, a2, a3
                    i, j = ij[0]
                    off = (0, n) if side == "V+" else (n, 0)
                    entry = M[off[0] + i][off[1] + j]
                    c = m[i][j]
                    if isinstance(c, EScalar):
                        if c.re.val is not None:
                            out.append(self.f_part(entry) / c.re if c.re != self._one
                                       else self.f_part(entry))
                        else:
                            out.append(self.s_part(entry) / c.im)
                    else:
                        out.append(entry if c == self._one else entry / c)
            return out

        return basis, coords

    def _compute_killing_const(self) -> Fraction:
        """Killing(X,Y) = const * tr_F(XY), with the constant computed from
        ad on the full basis rather than assumed."""
        H0 = self.H0()
        total = self.ctx.zero
        for i, bi in enumerate(self._g_basis):
            img = bracket(H0, bracket(H0, bi))
            total = total + self._g_coords(img)[i]
        trf = self.tr_F(mat_mul(H0, H0))
        num = total.unit * self.ctx.p ** total.val if total.val is not None else 0
        den = trf.unit * self.ctx.p ** trf.val
        const = Fraction(num, den)
        # spot-check the proportionality on basis pairs
        for a, b_ in ((0, 0), (1, len(self._g_basis) // 2)):
            X, Y = self._g_basis[a], self._g_basis[b_]
            kxy = self.ctx.zero
            adYbi = [bracket(Y, bi) for bi in self._g_basis]
            for i in range(len(self._g_basis)):
                kxy = kxy + self._g_coords(bracket(X, adYbi[i]))[i]
            expect = self._scale_fraction(self.tr_F(mat_mul(X, Y)), const)
            if not self._ps_eq(kxy, expect):
                raise RealizationError("Killing form is not a trace multiple")
        return const

    def _ps_eq(self, a: PadicScalar, b: PadicScalar) -> bool:
        return (a - b).val is None

    def _scale_fraction(self, x: PadicScalar, frac: Fraction) -> PadicScalar:
        return x * self.ctx.scalar((frac.numerator, frac.denominator))

    def tr_F(self, M) -> PadicScalar:
        """Trace of M as an F-linear endomorphism of the underlying F-space."""
        t = mat_trace(M)
        if isinstance(t, EScalar):
            return t.re + t.re
        return t

    def b_form(self, M1, M2) -> PadicScalar:
        """The normalized invariant form on g (big-matrix arguments)."""
        return self._scale_fraction(self.tr_F(mat_mul(M1, M2)), self._b_factor)

    # -- gradation checks -----------------------------------------------------

    def _check_gradation(self):
        H0 = self.H0()
        two = self.scalar(2)
        for j in range(self.n):
            Xb = self.big(self.X_j(j))
            Yb = self.big(self.Y_j(j))
            Hj = self.H_lambda(j)
            if bracket(Xb, Yb) != Hj and not self._mats_eq(bracket(Xb, Yb), Hj):
                raise RealizationError("sl2 triple relation [X_j, Y_j] = H_j fails")
            if not self._mats_eq(bracket(H0, Xb), mat_scal(two, Xb)):
                raise RealizationError("[H0, X_j] = 2 X_j fails")
        # piece dimensions: eigenvalues of each ad H_lambda on the V+ basis
        dims: Dict[Tuple[int, ...], int] = {}
        for m in self._vplus_basis:
            Xb = self.big(GradedElement("V+", m))
            sig = []
            for j in range(self.n):
                img = bracket(self.H_lambda(j), Xb)
                sig.append(self._eigen_ratio(img, Xb))
            dims[tuple(sig)] = dims.get(tuple(sig), 0) + 1
        for j in range(self.n):
            key = tuple(2 if t == j else 0 for t in range(self.n))
            if dims.get(key, 0) != self.ell:
                raise RealizationError("dim E_jj does not equal ell")
        for i in range(self.n):
            for j in range(i + 1, self.n):
                key = tuple(1 if t in (i, j) else 0 for t in range(self.n))
                if dims.get(key, 0) != self.d:
                    raise RealizationError("dim E_ij does not equal d")

    def _eigen_ratio(self, img, vec) -> int:
        for ri, rv in zip(img, vec):
            for x, y in zip(ri, rv):
                if not _is_zero(y):
                    if _is_zero(x):
                        return 0
                    q = (x / y) if not isinstance(x, EScalar) else (x / y).re
                    return q.unit * self.ctx.p ** q.val if q.val is not None else 0
        raise RealizationError("zero vector in eigen test")

    def _mats_eq(self, A, B) -> bool:
        return all(_diff_zero(x, y)
                   for ra, rb in zip(A, B) for x, y in zip(ra, rb))

    # -- determinants and relative invariants ----------------------------------

    def _det(self, M) -> object:
        """Exact determinant by fraction-free-ish Gaussian elimination."""
        m = [row[:] for row in M]
        size = len(m)
        det = self.scalar(1)
        for col in range(size):
            piv = None
            for r in range(col, size):
                if not _is_zero(m[r][col]):
                    piv = r
                    break
            if piv is None:
                return self.zero_scalar()
            if piv != col:
                m[col], m[piv] = m[piv], m[col]
                det = -det
            det = det * m[col][col]
            inv = (m[col][col].inverse() if isinstance(m[col][col], EScalar)
                   else self.scalar(1) / m[col][col])
            for r in range(col + 1, size):
                if _is_zero(m[r][col]):
                    continue
                f = m[r][col] * inv
                for c in range(col, size):
                    m[r][c] = _safe_sub(m[r][c], f * m[col][c])
        return det

    def delta_j(self, Z: GradedElement, j: int) -> PadicScalar:
        """Leading principal minor of size n - j of a V+ payload."""
        if Z.side != "V+":
            raise RealizationError("delta_j applies to V+ elements")
        size = self.n - j
        sub = [row[:size] for row in Z.payload[:size]]
        if size == 0:
            return self.ctx.one
        det = self._det(sub)
        if isinstance(det, EScalar):
            if det.im.val is not None:
                raise RealizationError("hermitian determinant has nonzero sqrt(eps) part")
            return det.re
        return det

    def nabla_j(self, Z: GradedElement, j: int) -> PadicScalar:
        """Trailing principal minor of size n - j of a V- payload."""
        if Z.side != "V-":
            raise RealizationError("nabla_j applies to V- elements")
        size = self.n - j
        if size == 0:
            return self.ctx.one
        sub = [row[self.n - size:] for row in Z.payload[self.n - size:]]
        det = self._det(sub)
        if isinstance(det, EScalar):
            if det.im.val is not None:
                raise RealizationError("hermitian determinant has nonzero sqrt(eps) part")
            return det.re
        return det

    def eval_invariants(self, Z: GradedElement) -> List[PadicScalar]:
        if Z.side == "V+":
            return [self.delta_j(Z, j) for j in range(self.n)]
        return [self.nabla_j(Z, j) for j in range(self.n)]

    # -- iota -------------------------------------------------------------------

    def _mat_inverse(self, M):
        size = len(M)
        m = [row[:] + [self.scalar(1) if i == j else self.zero_scalar()
                       for j in range(size)] for i, row in enumerate(M)]
        for col in range(size):
            piv = None
            for r in range(col, size):
                if not _is_zero(m[r][col]):
                    piv = r
                    break
            if piv is None:
                raise RealizationError("singular matrix")
            m[col], m[piv] = m[piv], m[col]
            inv = (m[col][col].inverse() if isinstance(m[col][col], EScalar)
                   else self.scalar(1) / m[col][col])
            m[col] = [x * inv for x in m[col]]
            for r in range(size):
                if r != col and not _is_zero(m[r][col]):
                    f = m[r][col]
                    m[r] = [_safe_sub(x, f * y) for x, y in zip(m[r], m[col])]
        return [row[size:] for row in m]

    def iota(self, X: GradedElement) -> GradedElement:
        """The V- completion of X to an sl2 triple with H0."""
        if X.side != "V+":
            raise RealizationError("iota applies to V+ elements")
        if self.delta_j(X, 0).val is None:
            raise RealizationError("iota requires Delta_0 != 0")
        inv = self._mat_inverse(X.payload)
        Y = GradedElement("V-", inv)
        # verify B * B^{-1} = I, which gives [big(X), big(Y)] = H0
        n = self.n
        for i in range(n):
            for j in range(n):
                acc = X.payload[i][0] * inv[0][j]
                for s in range(1, n):
                    acc = _safe_add(acc, X.payload[i][s] * inv[s][j])
                want = self.scalar(1 if i == j else 0)
                if not _diff_zero(acc, want):
                    raise RealizationError("iota bracket check failed")
        return Y

    # -- quadratic data -----------------------------------------------------------

    def _gram_to_diag(self, gram) -> DiagonalForm:
        diag, rank, _ = diagonalize_gram(gram, self.ctx)
        return DiagonalForm.from_scalars(diag, self.ctx) if rank else \
            DiagonalForm((), self.ctx)

    def q_X(self, X: GradedElement) -> DiagonalForm:
        """The form Y -> (1/2) b([X,[X,Y]], Y) on V-."""
        Xb = self.big(X)
        basis = [self.big(Yb) for Yb in self.vminus_basis()]
        imgs = [bracket(Xb, bracket(Xb, Y)) for Y in basis]
        half = self.ctx.scalar((1, 2))
        gram = [[self.b_form(imgs[a], basis[b]) * half
                 for b in range(len(basis))] for a in range(len(basis))]
        return self._gram_to_diag(gram)

    def q_pair(self, i: int, j: int) -> DiagonalForm:
        """The form Y -> -(1/2) b([X_i, Y], [X_j, Y]) on V-."""
        Xi, Xj = self.big(self.X_j(i)), self.big(self.X_j(j))
        basis = [self.big(Yb) for Yb in self.vminus_basis()]
        bi = [bracket(Xi, Y) for Y in basis]
        bj = [bracket(Xj, Y) for Y in basis]
        quarter = self.ctx.scalar((-1, 4))
        gram = [[(self.b_form(bi[a], bj[c]) + self.b_form(bi[c], bj[a])) * quarter
                 for c in range(len(basis))] for a in range(len(basis))]
        return self._gram_to_diag(gram)

    def k_space_basis(self, p: int, i: int, j: int) -> List[List[List[object]]]:
        """Basis (big matrices) of K_p(i,j): the joint eigenspace where
        ad of sum_{t<=p} H_t acts by i and ad of sum_{t>p} H_t acts by j."""
        hm = self.zeros(2 * self.n, 2 * self.n)
        hp = self.zeros(2 * self.n, 2 * self.n)
        for t in range(self.n):
            H = self.H_lambda(t)
            tgt = hm if t <= p else hp
            for a in range(2 * self.n):
                tgt[a][a] = tgt[a][a] + H[a][a]
        out = []
        for bi in self._g_basis:
            im = bracket(hm, bi)
            ip = bracket(hp, bi)
            try:
                em = self._eigen_ratio_or_none(im, bi)
                ep = self._eigen_ratio_or_none(ip, bi)
            except RealizationError:
                continue
            if em == i and ep == j:
                out.append(bi)
        return out

    def _eigen_ratio_or_none(self, img, vec):
        ratio = None
        for ri, rv in zip(img, vec):
            for x, y in zip(ri, rv):
                if not _is_zero(y):
                    r = 0 if _is_zero(x) else self._int_of(x / y)
                    if ratio is None:
                        ratio = r
                    elif ratio != r:
                        raise RealizationError("not an eigenvector")
                elif not _is_zero(x):
                    raise RealizationError("not an eigenvector")
        return ratio

    def _int_of(self, q) -> int:
        if isinstance(q, EScalar):
            if q.im.val is not None:
                raise RealizationError("non-scalar ratio")
            q = q.re
        if q.val is None:
            return 0
        return q.unit * self.ctx.p ** q.val

    def q_uv(self, a_scalars: Sequence, j: int, c) -> DiagonalForm:
        """The form A -> (1/2) b((ad A)^2 u', v) on K_{j-1}(1,-1),
        with u' = sum_{i<j} a_i Y_i and v = c X_j."""
        n = self.n
        up = self.zeros(n, n)
        for i, ai in enumerate(a_scalars):
            pos = n - 1 - i
            up[pos][pos] = self.scalar(ai)
        u_big = self.big(GradedElement("V-", up))
        vpay = self.zeros(n, n)
        vpay[n - 1 - j][n - 1 - j] = self.scalar(c)
        v_big = self.big(GradedElement("V+", vpay))
        basis = self.k_space_basis(j - 1, 1, -1)
        half = self.ctx.scalar((1, 2))
        quarter = self.ctx.scalar((1, 4))

        def sym(A1, A2):
            t1 = bracket(A1, bracket(A2, u_big))
            t2 = bracket(A2, bracket(A1, u_big))
            return (self.b_form(t1, v_big) + self.b_form(t2, v_big)) * quarter

        gram = [[sym(basis[a], basis[b]) for b in range(len(basis))]
                for a in range(len(basis))]
        return self._gram_to_diag(gram)

    def gamma_uv(self, a_scalars: Sequence, j: int, c) -> WeilIndex:
        q = self.q_uv(a_scalars, j, c)
        return weil_gamma(q)

    # -- orbits --------------------------------------------------------------------

    def _payload_rank(self, payload) -> int:
        m = [row[:] for row in payload]
        size = len(m)
        rank = 0
        row = 0
        for col in range(size):
            piv = None
            for r in range(row, size):
                if not _is_zero(m[r][col]):
                    piv = r
                    break
            if piv is None:
                continue
            m[row], m[piv] = m[piv], m[row]
            inv = (m[row][col].inverse() if isinstance(m[row][col], EScalar)
                   else self.scalar(1) / m[row][col])
            for r in range(row + 1, size):
                if not _is_zero(m[r][col]):
                    f = m[r][col] * inv
                    for cc in range(col, size):
                        m[r][cc] = _safe_sub(m[r][cc], f * m[row][cc])
            row += 1
            rank += 1
        return rank

    def _hermitian_diagonal(self, payload) -> List[PadicScalar]:
        """Diagonalize a hermitian payload by congruence; F diagonal values."""
        m = [row[:] for row in payload]
        size = len(m)
        out = []

        def apply_rowcol(i, j, u):
            # row_i += u * row_j ; col_i += conj(u) * col_j
            for c in range(size):
                m[i][c] = _safe_add(m[i][c], u * m[j][c])
            for r in range(size):
                m[r][i] = _safe_add(m[r][i], m[r][j] * _conj(u))

        def swap(i, j):
            m[i], m[j] = m[j], m[i]
            for r in range(size):
                m[r][i], m[r][j] = m[r][j], m[r][i]

        for col in range(size):
            piv = None
            for r in range(col, size):
                if not _is_zero(m[r][r]):
                    piv = r
                    break
            if piv is None:
                found = None
                for r in range(col, size):
                    for c in range(r + 1, size):
                        if not _is_zero(m[r][c]):
                            found = (r, c)
                            break
                    if found:
                        break
                if found is None:
                    break
                r, c = found
                # make the diagonal at r nonzero: try u = 1, then u = sqrt(eps)
                for u in ([self.scalar(1), self.sqrt_eps()] if self.hermitian
                          else [self.scalar(1)]):
                    saved = [row[:] for row in m]
                    apply_rowcol(r, c, u)
                    if not _is_zero(m[r][r]):
                        break
                    m = saved
                piv = r
            if _is_zero(m[piv][piv]):
                break
            if piv != col:
                swap(piv, col)
            dinv = (m[col][col].inverse() if isinstance(m[col][col], EScalar)
                    else self.scalar(1) / m[col][col])
            for r in range(col + 1, size):
                if not _is_zero(m[r][col]):
                    u = -(m[r][col] * dinv)
                    apply_rowcol(r, col, u)
            out.append(self.f_part(m[col][col]))
        return [x for x in out if x.val is not None]

    def element_orbit(self, Z: GradedElement) -> Dict[str, object]:
        """G-orbit label plus, when generic, the parabolic-orbit tag."""
        if Z.side != "V+":
            raise RealizationError("orbit labels are computed on V+")
        rank = self._payload_rank(Z.payload)
        label: Dict[str, object] = {"family": self.family, "rank": rank}
        if self.family == "SP":
            diag = [x for x in self._symmetric_diagonal(Z.payload)]
            form = DiagonalForm.from_scalars(diag, self.ctx)
            inv = isotropy_and_witt(form)
            label["witt_index"] = inv.witt_index
            label["similarity_class"] = similarity_signature(form)
        elif self.family == "SU":
            # the similitude scales det by mu^rank, so the determinant class
            # only separates orbits of even rank
            if rank and rank % 2 == 0:
                diag = self._hermitian_diagonal(Z.payload)
                det = diag[0]
                for x in diag[1:]:
                    det = det * x
                label["det_is_norm"] = hilbert_symbol(self.ctx.eps, det) == 1
        deltas = self.eval_invariants(Z)
        if all(x.val is not None for x in deltas):
            a = self.p_orbit_tag(deltas)
            # the similitude torus inside the parabolic shifts every a_j by
            # the same class, so only the products a_j a_k separate orbits
            # (square classes are 2-torsion, so coset_rep(c) represents c S_e)
            label["p_orbit"] = [self.Se.coset_rep(a[j] * a[self.k]).tag
                                for j in range(self.k)]
        return label

    def _symmetric_diagonal(self, payload) -> List[PadicScalar]:
        diag, rank, _ = diagonalize_gram([row[:] for row in payload], self.ctx)
        return diag

    def p_orbit_tag(self, deltas: Sequence[PadicScalar]) -> List[SquareClass]:
        """Solve Delta_j(Z) * a_j ... a_k in S_e for a in Sigma_e^{k+1}."""
        k = self.k
        S = self.Se
        a: List[Optional[SquareClass]] = [None] * (k + 1)
        acc = SC_ONE  # product a_{j+1} ... a_k
        for j in range(k, -1, -1):
            cls = square_class_of(deltas[j]) * acc
            a[j] = S.coset_rep(cls)
            acc = acc * a[j]
        return a  # type: ignore[return-value]

    # -- group and torus moves (used by the invariance tests) ---------------------

    def act_torus(self, Z: GradedElement, mu, t: Sequence) -> GradedElement:
        """Levi-torus move: payload -> mu^{-1} diag(t) payload diag(t)^(*)."""
        n = self.n
        tt = [self.scalar(x) for x in t]
        mui = self.scalar(1) / self.scalar(mu) if not self.hermitian \
            else self.scalar(mu).inverse()
        new = [[mui * tt[i] * Z.payload[i][j] *
                (_conj(tt[j]) if self.hermitian else tt[j])
                for j in range(n)] for i in range(n)]
        return GradedElement(Z.side, new)

    def act_group(self, Z: GradedElement, g, mu=1, g2=None) -> GradedElement:
        """Orbit move: GL payload -> g payload g2^{-1};
        SP -> mu^{-1} g payload g^T; SU -> mu^{-1} g payload conj(g)^T."""
        gm = [[self.scalar(x) for x in row] for row in g]
        if self.family == "GL":
            h = self._mat_inverse([[self.scalar(x) for x in row] for row in g2])
            return GradedElement(Z.side, mat_mul(gm, mat_mul(Z.payload, h)))
        mui = self.scalar(mu).inverse() if self.hermitian else self.scalar(1) / self.scalar(mu)
        gt = mat_conjT(gm) if self.hermitian else \
            [[gm[j][i] for j in range(self.n)] for i in range(self.n)]
        out = mat_mul(gm, mat_mul(Z.payload, gt))
        return GradedElement(Z.side, [[mui * x for x in row] for row in out])

    def act_unipotent(self, Z: GradedElement, u) -> GradedElement:
        """Congruence by a unit lower-triangular matrix (an N-move)."""
        um = [[self.scalar(x) for x in row] for row in u]
        ut = mat_conjT(um) if self.hermitian else \
            [[um[j][i] for j in range(self.n)] for i in range(self.n)]
        return GradedElement(Z.side, mat_mul(um, mat_mul(Z.payload, ut)))

    def x_char(self, j: int, mu, t: Sequence) -> PadicScalar:
        """The torus character with l . X_j = x_j(l) X_j."""
        pos = self.n - 1 - j
        tj = self.scalar(t[pos])
        if self.hermitian:
            val = tj * _conj(tj)
            return (self.f_part(val)) / self.ctx.scalar(mu)
        return tj * tj / self.ctx.scalar(mu)

    # -- rho_P ---------------------------------------------------------------------

    def two_rho_p_coeffs(self) -> List[Fraction]:
        """Coefficients of 2 rho_P on (lambda_0 .. lambda_k), from the
        weights of the nilradical basis elements."""
        coeffs = [Fraction(0)] * self.n
        for bi in self._g_basis:
            sig = []
            ok = True
            for t in range(self.n):
                try:
                    sig.append(self._eigen_ratio_or_none(
                        bracket(self.H_lambda(t), bi), bi))
                except RealizationError:
                    ok = False
                    break
            if not ok or any(s is None for s in sig):
                continue
            # g0 pieces with weight (lambda_i - lambda_j)/2, i < j, span the
            # nilradical (lower-triangular congruence moves)
            nz = [t for t in range(self.n) if sig[t]]
            if len(nz) == 2 and sig[nz[0]] == 1 and sig[nz[1]] == -1:
                for t in range(self.n):
                    coeffs[t] += Fraction(sig[t], 2)
        return coeffs


def build_realization(family: str, n: int, ctx: LocalFieldContext) -> RealizationContext:
    return RealizationContext(family, n, ctx)
