"""BV operators for the finite-dimensional toy theory.

Functions live in Q[hbar, hbar^-1][x_1..x_d] tensor Lambda[xi_1..xi_d], where
xi_a is the odd partner (antifield) of x_a. A monomial is keyed by
``(hbar power, x exponents, sorted tuple of odd indices)``.

Conventions (S_kin = -1/2 sum_a lam_a x_a^2):
  Q      = -sum_a lam_a x_a d/dxi_a        so Q(V^a xi_a) = V(S_kin)
  div_L  = sum_{lam_a <= L} d/dx_a d/dxi_a (the BV Laplacian on low modes)
  {F, G} = div(FG) - div(F) G - (-1)^|F| F div(G)
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from sigma_forge.algebra.series import TruncSeries, monomials_upto


def _merge_odd(a, b):
    """Product of odd monomials: (sign, merged) or (0, None) if an index repeats."""
    if set(a) & set(b):
        return 0, None
    inv = sum(1 for x in a for y in b if x > y)
    return (-1) ** inv, tuple(sorted(a + b))


class SuperPoly:
    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        clean = {}
        for (h, e, o), c in (terms or {}).items():
            c = Fraction(c)
            key = (int(h), tuple(e), tuple(o))
            word = key[2]
            if len(set(word)) != len(word):
                continue  # xi_a^2 = 0
            if list(word) != sorted(word):
                inv = sum(1 for i in range(len(word)) for j in range(i + 1, len(word)) if word[i] > word[j])
                c *= (-1) ** inv
                key = (key[0], key[1], tuple(sorted(word)))
            v = clean.get(key, 0) + c
            if v:
                clean[key] = v
            else:
                clean.pop(key, None)
        self._terms = clean

    @classmethod
    def _raw(cls, nvars, terms):
        obj = object.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        return obj

    @classmethod
    def from_series(cls, s: TruncSeries, hbar=0, odd=()):
        return cls(s.nvars, {(hbar, e, tuple(odd)): c for e, c in s.terms.items()})

    @classmethod
    def monomial(cls, nvars, exps, odd=(), coeff=1, hbar=0):
        return cls(nvars, {(hbar, tuple(exps), tuple(odd)): coeff})

    @property
    def terms(self):
        return dict(self._terms)

    def is_zero(self):
        return not self._terms

    def parity(self):
        """Parity of the odd degree; raises if the polynomial is not homogeneous."""
        ps = {len(o) % 2 for (_, _, o) in self._terms}
        if len(ps) > 1:
            raise ValueError("inhomogeneous parity")
        return ps.pop() if ps else 0

    def __add__(self, other):
        out = dict(self._terms)
        for k, v in other._terms.items():
            w = out.get(k, 0) + v
            if w:
                out[k] = w
            else:
                out.pop(k, None)
        return SuperPoly._raw(self.nvars, out)

    def __neg__(self):
        return SuperPoly._raw(self.nvars, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return SuperPoly._raw(self.nvars, {})
        return SuperPoly._raw(self.nvars, {k: v * c for k, v in self._terms.items()})

    def hbar_shift(self, k):
        return SuperPoly._raw(self.nvars, {(h + k, e, o): v for (h, e, o), v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        out = {}
        for (h1, e1, o1), c1 in self._terms.items():
            for (h2, e2, o2), c2 in other._terms.items():
                sgn, o = _merge_odd(o1, o2)
                if not sgn:
                    continue
                k = (h1 + h2, tuple(a + b for a, b in zip(e1, e2)), o)
                out[k] = out.get(k, 0) + sgn * c1 * c2
        return SuperPoly._raw(self.nvars, {k: v for k, v in out.items() if v})

    def d_x(self, a):
        out = {}
        for (h, e, o), c in self._terms.items():
            if e[a]:
                e2 = list(e)
                e2[a] -= 1
                k = (h, tuple(e2), o)
                out[k] = out.get(k, 0) + c * e[a]
        return SuperPoly._raw(self.nvars, {k: v for k, v in out.items() if v})

    def d_xi(self, a):
        """Left derivative in the odd variable xi_a."""
        out = {}
        for (h, e, o), c in self._terms.items():
            if a in o:
                p = o.index(a)
                k = (h, e, o[:p] + o[p + 1:])
                out[k] = out.get(k, 0) + (-1) ** p * c
        return SuperPoly._raw(self.nvars, {k: v for k, v in out.items() if v})

    def times_x(self, a, c=1):
        out = {}
        for (h, e, o), v in self._terms.items():
            e2 = list(e)
            e2[a] += 1
            out[(h, tuple(e2), o)] = v * c
        return SuperPoly._raw(self.nvars, {k: v for k, v in out.items() if v})

    def restrict(self, zero_vars):
        """Set the listed even variables to zero."""
        zs = set(zero_vars)
        return SuperPoly._raw(self.nvars, {k: v for k, v in self._terms.items() if not any(k[1][i] for i in zs)})

    def __eq__(self, other):
        if not isinstance(other, SuperPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    __hash__ = None

    def to_text(self):
        def key(item):
            (h, e, o), _ = item
            return (h, sum(e), tuple(-x for x in e), o)

        lines = []
        for (h, e, o), c in sorted(self._terms.items(), key=key):
            lines.append(f"h^{h} {','.join(map(str, e))} [{','.join(map(str, o))}] : {c}\n")
        return "".join(lines)

    def __repr__(self):
        return f"SuperPoly({self.to_text().strip() or '0'})"


@dataclass
class BVOperators:
    eigenvalues: tuple
    cutoff: Fraction | None
    low: list

    def Q(self, f: SuperPoly) -> SuperPoly:
        out = SuperPoly(f.nvars)
        for a, lam in enumerate(self.eigenvalues):
            out = out + f.d_xi(a).times_x(a, -lam)
        return out

    def div(self, f: SuperPoly) -> SuperPoly:
        out = SuperPoly(f.nvars)
        for a in self.low:
            out = out + f.d_xi(a).d_x(a)
        return out

    def total(self, f: SuperPoly) -> SuperPoly:
        """(Q + hbar div) f."""
        return self.Q(f) + self.div(f).hbar_shift(1)

    def bracket(self, F: SuperPoly, G: SuperPoly) -> SuperPoly:
        sgn = -1 if F.parity() else 1
        return self.div(F * G) - self.div(F) * G - (F * self.div(G)).scale(sgn)


def bv_operators(model, cutoff=None) -> BVOperators:
    """Q, div_L and the bracket; ``cutoff=None`` keeps every mode."""
    lam = tuple(model.eigenvalues)
    low = list(range(len(lam))) if cutoff is None else model.low_modes(cutoff)
    return BVOperators(lam, None if cutoff is None else Fraction(cutoff), low)


def spanning_set(nvars: int, degree: int):
    """Monomials x^m xi_S with |m| <= degree and any odd subset S."""
    out = []
    for e in monomials_upto(nvars, degree):
        for k in range(nvars + 1):
            for S in combinations(range(nvars), k):
                out.append(SuperPoly.monomial(nvars, e, S))
    return out


def square_zero_residual(ops: BVOperators, polys) -> int:
    """Number of inputs on which (Q + hbar div)^2 is nonzero."""
    return sum(0 if ops.total(ops.total(f)).is_zero() else 1 for f in polys)


def kinetic_action(model) -> SuperPoly:
    n = model.dim
    out = SuperPoly(n)
    for a, lam in enumerate(model.eigenvalues):
        e = [0] * n
        e[a] = 2
        out = out + SuperPoly.monomial(n, e, (), -lam / 2)
    return out


def vector_field_poly(components) -> SuperPoly:
    """V = sum_a V^a d_a as the odd-linear function sum_a V^a xi_a."""
    n = components[0].nvars
    out = SuperPoly(n)
    for a, comp in enumerate(components):
        out = out + SuperPoly.from_series(comp, odd=(a,))
    return out


# Gaussian integration over high modes


def _dfact(k):
    r = 1
    while k > 1:
        r *= k
        k -= 2
    return r


def gaussian_high_expectation(f: SuperPoly, eigenvalues, high) -> SuperPoly:
    """Integrate the high modes against exp(-sum lam x^2 / 2 hbar) using moments.

    E[x_a^(2k)] = (2k-1)!! (hbar/lam_a)^k and odd moments vanish.
    """
    out = {}
    for (h, e, o), c in f.terms.items():
        coeff = c
        hh = h
        e2 = list(e)
        for a in high:
            k = e[a]
            if k % 2:
                coeff = 0
                break
            coeff *= Fraction(_dfact(k - 1)) / eigenvalues[a] ** (k // 2)
            hh += k // 2
            e2[a] = 0
        if coeff:
            key = (hh, tuple(e2), o)
            out[key] = out.get(key, 0) + coeff
    return SuperPoly(f.nvars, out)


def exp_hbar_contract(f: SuperPoly, P) -> SuperPoly:
    """e^{hbar d_P} f for a polynomial f (terminating)."""
    n = f.nvars
    total = f
    term = f
    k = 0
    while True:
        k += 1
        nxt = SuperPoly(n)
        for i in range(n):
            for j in range(n):
                if P[i][j]:
                    nxt = nxt + term.d_x(j).d_x(i).scale(Fraction(P[i][j], 2))
        term = nxt.hbar_shift(1).scale(Fraction(1, k))
        if term.is_zero():
            return total
        total = total + term


@dataclass
class DescentResult:
    vacuous: bool
    v_lambda: list = field(default_factory=list)
    lhs: SuperPoly | None = None
    rhs: SuperPoly | None = None
    residual: SuperPoly | None = None
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return self.residual is None or self.residual.is_zero()


def scale_descent_check(model, V, cutoff) -> DescentResult:
    """Check that integrating out modes above ``cutoff`` commutes with L_V.

    LHS: E_high[div V - (1/hbar) sum_a lam_a x_a V^a] by Gaussian moments.
    RHS: div_low V[L] - (1/hbar) sum_low lam_a x_a V[L]^a with
         V[L] = (e^{hbar d_P(L, inf)} V)|_{x_high = 0}, low components only.
    """
    lam = model.eigenvalues
    n = model.dim
    high = model.high_modes(cutoff)
    low = model.low_modes(cutoff)
    comps = [SuperPoly.from_series(c) if isinstance(c, TruncSeries) else c for c in V]
    if len(comps) != n:
        raise ValueError("one component per mode is required")
    if not high or not low:
        return DescentResult(True, notes=["no eigenvalue split at this cutoff; check is vacuous"])
    integrand = SuperPoly(n)
    for a in range(n):
        integrand = integrand + comps[a].d_x(a) - comps[a].times_x(a, lam[a]).hbar_shift(-1)
    lhs = gaussian_high_expectation(integrand, lam, high)
    P = [[Fraction(0)] * n for _ in range(n)]
    for a in high:
        P[a][a] = 1 / lam[a]
    vl = [exp_hbar_contract(comps[a], P).restrict(high) if a in low else SuperPoly(n) for a in range(n)]
    rhs = SuperPoly(n)
    for a in low:
        rhs = rhs + vl[a].d_x(a) - vl[a].times_x(a, lam[a]).hbar_shift(-1)
    return DescentResult(False, vl, lhs, rhs, lhs - rhs)
