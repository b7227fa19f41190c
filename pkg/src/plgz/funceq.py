"""Functional-equation data for the graded zeta functions.

The spectral bookkeeping (induction parameters mu, twist characters delta,
their repackaging as (omega, s) and the sharp involution), the coefficient
matrices D^k and B relating the two sides of the functional equation, the
scalar factor d(delta, mu, z), and the candidate local L- and epsilon-factors
for the split-stabilizer cases.

Every matrix entry is computable along two independent routes (a closed
product formula and the inductive one-step recursion, or the direct y-sum
and the reindexed D-path); the assemblers evaluate both and refuse to
return a value they disagree on.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Callable, Dict, Optional, Sequence, Tuple

from .padic import LocalFieldContext, SquareClass, SC_ONE, square_class_of
from .quadform import DiagonalForm, SeGroup, build_qe_and_Se, similarity_signature
from .characters import (AdditiveCharacter, TameMultChar, tate_rho, rho_tilde,
                         local_factors, trivial_char)
from .weil import weil_gamma, gamma_k

TOL = 1e-9

__all__ = [
    "FunceqError", "SpectralParams", "spectral_params", "sharp_pair",
    "CoeffMatrix", "D_coeff", "D_coeff_recursive", "B_and_A",
    "d_factor", "epsilon_factors", "orbit_block",
]


class FunceqError(ValueError):
    pass


# ---------------------------------------------------------------------------
# spectral parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralParams:
    """The parameter point (delta, mu) and its derived (omega, s) data.

    delta is a tuple of k+1 unitary tame characters, mu a tuple of k+1
    complex exponents.  Derived fields:

      omega_0 = delta_0^{-1},   omega_j = delta_{j-1} delta_j^{-1}
      s_0 = kd/4 - mu_0,        s_j = mu_{j-1} - mu_j - d/2
      rho_j = d(k - 2j)/4,      m = 1 + kd/2

    so that omega_0...omega_j = delta_j^{-1} and s_0+...+s_j = rho_j - mu_j.
    """

    k: int
    e: int
    d: int
    kappa: int
    delta: Tuple[TameMultChar, ...]
    mu: Tuple[complex, ...]
    omega: Tuple[TameMultChar, ...] = field(init=False)
    s: Tuple[complex, ...] = field(init=False)
    rho: Tuple[float, ...] = field(init=False)
    m: float = field(init=False)

    def __post_init__(self):
        k = self.k
        if len(self.delta) != k + 1 or len(self.mu) != k + 1:
            raise FunceqError(f"need {k + 1} characters and exponents")
        for dj in self.delta:
            if abs(abs(dj.value_at_pi) - 1) > TOL:
                raise FunceqError("twist characters must be unitary")
        om = [self.delta[0].inverse()]
        for j in range(1, k + 1):
            om.append(self.delta[j - 1] * self.delta[j].inverse())
        s = [k * self.d / 4.0 - self.mu[0]]
        for j in range(1, k + 1):
            s.append(self.mu[j - 1] - self.mu[j] - self.d / 2.0)
        object.__setattr__(self, "omega", tuple(om))
        object.__setattr__(self, "s", tuple(s))
        object.__setattr__(self, "rho",
                           tuple(self.d * (k - 2 * j) / 4.0 for j in range(k + 1)))
        object.__setattr__(self, "m", 1.0 + k * self.d / 2.0)

    @property
    def ctx(self) -> LocalFieldContext:
        return self.delta[0].ctx

    @property
    def Se(self) -> SeGroup:
        return build_qe_and_Se(self.d, self.e, self.ctx)[1]

    def c_factor(self, a_under: Sequence[SquareClass]) -> complex:
        """c(a) = prod_{j<k} delta_j(a_j) |a_j|^{-(rho_j - mu_j)}."""
        if len(a_under) != self.k:
            raise FunceqError(f"expected {self.k} orbit labels")
        ctx = self.ctx
        out = 1.0 + 0j
        for j, aj in enumerate(a_under):
            rep = ctx.class_rep(aj)
            absa = float(ctx.q) ** (-rep.val)
            out *= self.delta[j].value(rep) * absa ** -(self.rho[j] - self.mu[j])
        return out

    def in_dominance_cone(self) -> bool:
        """Strict dominance: Re(s_j) > 0 for every j >= 1 and Re(s_0) > 0."""
        return all(complex(sj).real > 0 for sj in self.s)

    def sharp(self) -> Tuple[Tuple[TameMultChar, ...], Tuple[complex, ...]]:
        return sharp_pair(self.omega, self.s)


def spectral_params(k: int, e: int, d: int, kappa: int,
                    delta: Sequence[TameMultChar],
                    mu: Sequence[complex]) -> SpectralParams:
    return SpectralParams(k, e, d, kappa, tuple(delta),
                          tuple(complex(x) for x in mu))


def sharp_pair(omega: Sequence[TameMultChar], s: Sequence[complex]):
    """The involution (omega, s) -> (omega#, s#) swapping the two zeta sides.

    s#  = (-(s_0+...+s_k), s_k, ..., s_1)
    om# = ((omega_0...omega_k)^{-1}, omega_k, ..., omega_1)
    """
    k = len(s) - 1
    if len(omega) != k + 1:
        raise FunceqError("length mismatch")
    tot = omega[0]
    for w in omega[1:]:
        tot = tot * w
    om_sharp = (tot.inverse(),) + tuple(omega[k - i] for i in range(k))
    s_sharp = (-sum(s),) + tuple(s[k - i] for i in range(k))
    return om_sharp, s_sharp


# ---------------------------------------------------------------------------
# the coefficient D^k
# ---------------------------------------------------------------------------


def _check_indices(S: SeGroup, *tuples):
    for t in tuples:
        for c in t:
            if c not in S.sigma:
                raise FunceqError(f"index {c.tag} not a coset representative")


def _D_closed(ctx, e, d, S, omega, s, a, c, psi) -> complex:
    k = len(a) - 1
    minus = square_class_of(ctx.minus_one)
    val = 1.0 + 0j
    for j in range(1, k + 1):
        val *= gamma_k(tuple(a[:j]), c[j], e, d, j, ctx, psi).value
    w = None
    ssum = 0.0 + 0j
    for j in range(k + 1):
        w = omega[j] if w is None else w * omega[j]
        ssum += s[j]
        x = minus * a[j] * c[j]
        val *= w.value_minus_one() * rho_tilde(w.inverse(),
                                               -(ssum + j * d / 2.0), x, S, psi)
    return val


def _resolve(sp: SpectralParams, omega, s):
    omega = sp.omega if omega is None else tuple(omega)
    s = sp.s if s is None else tuple(complex(x) for x in s)
    if len(omega) != len(s):
        raise FunceqError("omega/s length mismatch")
    return omega, s


def D_coeff(sp: SpectralParams, a: Sequence[SquareClass], c: Sequence[SquareClass],
            *, omega=None, s=None,
            psi: Optional[AdditiveCharacter] = None) -> complex:
    """Closed product formula for the functional-equation coefficient:

    D^k_{a,c}(omega, s) = prod_{j=1..k} gamma_j(a_{<j}, c_j)
        * prod_{j=0..k} (om_0..om_j)(-1)
            * rho~((om_0..om_j)^{-1}, -(s_0+..+s_j + jd/2); -a_j c_j)
    """
    omega, s = _resolve(sp, omega, s)
    if not len(a) == len(c) == len(omega):
        raise FunceqError("index tuples must match the parameter length")
    S = sp.Se
    _check_indices(S, a, c)
    return _D_closed(sp.ctx, sp.e, sp.d, S, omega, s, tuple(a), tuple(c), psi)


def D_coeff_recursive(sp: SpectralParams, a, c, *, omega=None, s=None,
                      psi: Optional[AdditiveCharacter] = None) -> complex:
    """Same coefficient by the one-step recursion

    D^k = gamma_k(a_{<k}, c_k) * (om_0..om_k)(-1)
          * rho~((om_0..om_k)^{-1}, -(s_0+..+s_k+kd/2); -a_k c_k) * D^{k-1}

    down to D^0 = om_0(-1) rho~(om_0^{-1}, -s_0; -a_0 c_0).
    """
    omega, s = _resolve(sp, omega, s)
    if not len(a) == len(c) == len(omega):
        raise FunceqError("index tuples must match the parameter length")
    ctx, S = sp.ctx, sp.Se
    _check_indices(S, a, c)
    minus = square_class_of(ctx.minus_one)

    def rec(j: int) -> complex:
        w = omega[0]
        for wj in omega[1:j + 1]:
            w = w * wj
        ssum = sum(s[:j + 1])
        step = (w.value_minus_one()
                * rho_tilde(w.inverse(), -(ssum + j * sp.d / 2.0),
                            minus * a[j] * c[j], S, psi))
        if j == 0:
            return step
        return gamma_k(tuple(a[:j]), c[j], sp.e, sp.d, j, ctx, psi).value * step * rec(j - 1)

    return rec(len(a) - 1)


# ---------------------------------------------------------------------------
# the B and A matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoeffMatrix:
    """A coefficient matrix indexed by tuples of coset representatives."""

    kind: str  # "D", "B" or "A"
    index: Tuple[Tuple[str, ...], ...]  # row/column labels, as class tags
    entries: Dict[Tuple[Tuple[str, ...], Tuple[str, ...]], complex]
    blocks: Optional[Dict[Tuple[str, ...], object]] = None

    def entry(self, a_tags, c_tags) -> complex:
        return self.entries[(tuple(a_tags), tuple(c_tags))]

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "index": [list(t) for t in self.index],
            "entries": {
                ",".join(a) + "|" + ",".join(c): [z.real, z.imag]
                for (a, c), z in sorted(self.entries.items())
            },
        }
        if self.blocks is not None:
            out["blocks"] = {",".join(t): repr(b) for t, b in sorted(self.blocks.items())}
        return out


def orbit_block(sp: SpectralParams, a_under: Sequence[SquareClass]):
    """The open-orbit label attached to a column index a = (a_0..a_{k-1}).

    For e = 2 this is the coset of a_0...a_{k-1} modulo the norm group; for
    e odd the similarity class of the diagonal form <a_0,...,a_{k-1},1>;
    for e in {0,4} everything sits in the single open orbit.
    """
    if sp.e in (0, 4):
        return "open"
    if sp.e == 2:
        prod = SC_ONE
        for cls in a_under:
            prod = prod * cls
        return sp.Se.coset_rep(prod).tag
    form = DiagonalForm(tuple(a_under) + (SC_ONE,), sp.ctx)
    return similarity_signature(form)


def _B_direct(sp: SpectralParams, z: complex, a, c, psi) -> complex:
    ctx, S = sp.ctx, sp.Se
    k, d, e = sp.k, sp.d, sp.e
    minus = square_class_of(ctx.minus_one)
    total = 0.0 + 0j
    for y in S.sigma:
        term = (gamma_k(tuple(a), y, e, d, k, ctx, psi).value
                * sp.delta[k].value_minus_one()
                * rho_tilde(sp.delta[k], sp.mu[k] - z + 1.0, minus * y, S, psi))
        for j in range(1, k):
            term *= gamma_k(tuple(a[:j]), S.coset_rep(y * c[j]), e, d, j, ctx, psi).value
        for j in range(k):
            term *= (sp.delta[j].value_minus_one()
                     * rho_tilde(sp.delta[j], sp.mu[j] - z + 1.0,
                                 minus * a[j] * c[j] * y, S, psi))
        total += term
    return sp.c_factor(a) / sp.c_factor(c) * total


def _B_via_D(sp: SpectralParams, z: complex, a, c, psi) -> complex:
    # reindex each y-summand as a D^k entry at the shifted point
    # s_0 -> s_0 + z - (m+1)/2, where -(s_0+..+s_j+jd/2) becomes mu_j - z + 1
    # and (om_0..om_j)^{-1} = delta_j.
    S = sp.Se
    shift = z - (sp.m + 1.0) / 2.0
    s_shift = (sp.s[0] + shift,) + sp.s[1:]
    total = 0.0 + 0j
    for y in S.sigma:
        a_ext = tuple(a) + (SC_ONE,)
        c_ext = tuple(S.coset_rep(y * cj) for cj in c) + (y,)
        total += _D_closed(sp.ctx, sp.e, sp.d, S, sp.omega, s_shift,
                           a_ext, c_ext, psi)
    return sp.c_factor(a) / sp.c_factor(c) * total


def B_and_A(sp: SpectralParams, z: complex,
            psi: Optional[AdditiveCharacter] = None,
            tol: float = 1e-8) -> Tuple[CoeffMatrix, CoeffMatrix]:
    """The full B(z) matrix over Sigma_e^k x Sigma_e^k and A = B((m+1)/2).

    Each entry of B is evaluated twice -- by the direct y-sum and through
    the reindexed D^k product -- and the two must agree to ``tol``.  A
    carries the open-orbit block label of each index tuple.
    """
    S = sp.Se
    index = tuple(iproduct(S.sigma, repeat=sp.k)) if sp.k else ((),)
    z = complex(z)
    zA = complex((sp.m + 1.0) / 2.0)

    def assemble(zz: complex, kind: str) -> CoeffMatrix:
        entries = {}
        for a in index:
            for c in index:
                direct = _B_direct(sp, zz, a, c, psi)
                via_d = _B_via_D(sp, zz, a, c, psi)
                if abs(direct - via_d) > tol * max(1.0, abs(direct)):
                    raise FunceqError(
                        f"B entry disagreement at {a}/{c}: {direct} vs {via_d}")
                entries[(tuple(x.tag for x in a), tuple(x.tag for x in c))] = direct
        tags = tuple(tuple(x.tag for x in a) for a in index)
        blocks = None
        if kind == "A":
            blocks = {tuple(x.tag for x in a): orbit_block(sp, a) for a in index}
        return CoeffMatrix(kind, tags, entries, blocks)

    return assemble(z, "B"), assemble(zA, "A")


# ---------------------------------------------------------------------------
# d(delta, mu, z), L- and epsilon-factors (split stabilizer only)
# ---------------------------------------------------------------------------


def d_factor(sp: SpectralParams, z: complex,
             psi: Optional[AdditiveCharacter] = None) -> complex:
    """d(delta,mu,z) = gamma(q_e)^{k(k+1)/2} prod_j delta_j(-1) rho(delta_j, mu_j+1-z)."""
    if sp.e not in (0, 4):
        raise FunceqError("d-factor requires a split stabilizer (e in {0,4})")
    qe, _ = build_qe_and_Se(sp.d, sp.e, sp.ctx)
    g = weil_gamma(qe, psi).value
    val = g ** (sp.k * (sp.k + 1) // 2)
    for j in range(sp.k + 1):
        val *= sp.delta[j].value_minus_one() * tate_rho(sp.delta[j],
                                                        sp.mu[j] + 1.0 - z, psi)
    return val


def _L0(delta: TameMultChar, zz: complex) -> complex:
    if delta.is_ramified:
        return 1.0 + 0j
    den = 1 - delta.value_at_pi * delta.ctx.q ** (-zz)
    if abs(den) <= TOL:
        raise ZeroDivisionError("pole of L_0")
    return 1.0 / den


def epsilon_factors(sp: SpectralParams, z: complex,
                    psi: Optional[AdditiveCharacter] = None,
                    Q_plus: Optional[Callable[[complex], complex]] = None,
                    Q_minus: Optional[Callable[[complex], complex]] = None,
                    ) -> Tuple[complex, complex, complex, complex]:
    """(eps+, eps-, L+, L-) at the point z for e in {0,4}.

    L+(z) = Q+(q^{-z})^{-1} prod_j L_0(delta_j^{-1}, z - mu_j)
    L-(z) = Q-(q^{-z})^{-1} prod_j L_0(delta_j,      z + mu_j)
    eps+(z) = d(delta,mu,z) L+(z) / L-(1-z)
    eps-(z) = (delta_0...delta_k)(-1) / d(delta,mu,1-z) * L-(z) / L+(1-z)

    The correction polynomials default to 1 (generic position); they take
    the variable u = q^{-z}.
    """
    if sp.e not in (0, 4):
        raise FunceqError("epsilon factors require e in {0,4}")
    q = sp.ctx.q
    Qp = Q_plus if Q_plus is not None else (lambda u: 1.0 + 0j)
    Qm = Q_minus if Q_minus is not None else (lambda u: 1.0 + 0j)

    def Lp(zz: complex) -> complex:
        val = 1.0 / Qp(q ** (-zz))
        for j in range(sp.k + 1):
            val *= _L0(sp.delta[j].inverse(), zz - sp.mu[j])
        return val

    def Lm(zz: complex) -> complex:
        val = 1.0 / Qm(q ** (-zz))
        for j in range(sp.k + 1):
            val *= _L0(sp.delta[j], zz + sp.mu[j])
        return val

    sign = 1.0 + 0j
    for dj in sp.delta:
        sign *= dj.value_minus_one()
    eps_plus = d_factor(sp, z, psi) * Lp(z) / Lm(1 - z)
    eps_minus = sign / d_factor(sp, 1 - z, psi) * Lm(z) / Lp(1 - z)
    return eps_plus, eps_minus, Lp(z), Lm(z)


def monomial_fit(fn: Callable[[complex], complex], q: int, z0: complex = 0.37 + 0.21j,
                 tol: float = TOL) -> Tuple[complex, float]:
    """Fit fn(z) = c0 * q^{-n0 z} from three sample points, or raise.

    Returns (c0, n0) with n0 a half-integer; used to certify that an
    epsilon factor with trivial correction polynomials is a monomial.
    """
    e1, e2 = fn(z0), fn(z0 + 1)
    n0 = math.log(abs(e1 / e2)) / math.log(q)
    n0r = round(2 * n0) / 2
    c0 = e1 * q ** (n0r * z0)
    resid = abs(fn(z0 + 0.5) - c0 * q ** (-n0r * (z0 + 0.5)))
    if abs(n0 - n0r) > 100 * tol or resid > 100 * tol * max(1.0, abs(c0)):
        raise ArithmeticError("monomial fit failed")
    return c0, n0r
