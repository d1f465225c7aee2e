"""Gaussian integrals, Wick contraction and effective interactions in finite dimension.

For a positive-definite A the normalised measure exp(-(x, Ax)/2) has
covariance P = A^{-1}, and d_P = 1/2 sum_ij P_ij d_i d_j is the Wick
contraction operator. Integrals are then (e^{d_P} f)(0).
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import factorial, lcm

from sigma_forge.algebra.hbar import HbarSeries
from sigma_forge.algebra.linalg import inverse, is_positive_definite, is_symmetric
from sigma_forge.algebra.series import TruncSeries
from sigma_forge.errors import DimensionMismatchError, DomainError


class GaussianModel:
    """Eigenvalues lam_a > 0 of -Q in an orthonormal basis x_a."""

    def __init__(self, eigenvalues, odd_partners=False):
        self.eigenvalues = tuple(Fraction(x) for x in eigenvalues)
        if not self.eigenvalues:
            raise DomainError("a Gaussian model needs at least one mode")
        if any(x <= 0 for x in self.eigenvalues):
            raise DomainError("eigenvalues of -Q must be positive")
        self.odd_partners = odd_partners

    @property
    def dim(self):
        return len(self.eigenvalues)

    def low_modes(self, cutoff):
        cutoff = Fraction(cutoff)
        return [a for a, x in enumerate(self.eigenvalues) if x <= cutoff]

    def high_modes(self, cutoff):
        cutoff = Fraction(cutoff)
        return [a for a, x in enumerate(self.eigenvalues) if x > cutoff]

    def propagator(self, lo, hi=None):
        from sigma_forge.regulators import EigenPropagator

        return EigenPropagator(self.eigenvalues, lo, hi).matrix()

    def __repr__(self):
        return f"GaussianModel({[str(x) for x in self.eigenvalues]})"


class Interaction(HbarSeries):
    """hbar-series of polynomial functions on the model's variables."""

    __slots__ = ()

    @classmethod
    def wrap(cls, h: HbarSeries):
        return cls(h.hbar_cutoff, h.coefficients)

    @property
    def nvars(self):
        return self.coefficients[0].nvars

    @property
    def cutoff(self):
        return self.coefficients[0].cutoff

    def at_least_cubic_mod_hbar(self) -> bool:
        o = self.coefficients[0].order()
        return o is None or o >= 3


def _as_matrix(P, n=None):
    if hasattr(P, "matrix"):
        P = P.matrix()
    P = [[Fraction(x) for x in row] for row in P]
    if n is not None and len(P) != n:
        raise DimensionMismatchError(f"propagator is {len(P)}x{len(P)}, expected {n}")
    if not is_symmetric(P):
        raise DomainError("propagator must be symmetric")
    return P


def contract(P, F: TruncSeries) -> TruncSeries:
    """d_P F = 1/2 sum_ij P_ij d_i d_j F."""
    P = _as_matrix(P, F.nvars)
    n = F.nvars
    out = {}
    half = Fraction(1, 2)
    for e, c in F.terms.items():
        for i in range(n):
            if not e[i]:
                continue
            for j in range(n):
                p = P[i][j]
                if not p:
                    continue
                e2 = list(e)
                k = e2[i]
                e2[i] -= 1
                m = e2[j]
                if not m:
                    continue
                e2[j] -= 1
                key = tuple(e2)
                out[key] = out.get(key, 0) + half * p * c * k * m
    return TruncSeries(n, F.cutoff, out)


def exp_contract(P, F: TruncSeries, scale=1) -> TruncSeries:
    """e^{scale * d_P} F, exact for polynomials (the series terminates)."""
    total = F
    term = F
    k = 0
    while True:
        k += 1
        term = contract(P, term).scale(Fraction(scale) / k)
        if term.is_zero():
            return total
        total = total + term


def full_contraction_value(P, F: TruncSeries) -> Fraction:
    """(e^{d_P} F)(0)."""
    return exp_contract(P, F).constant_term


def _multiset_arrangements(items):
    """Distinct orderings of a multiset (sorted input)."""
    counts = {}
    for x in items:
        counts[x] = counts.get(x, 0) + 1
    keys = sorted(counts)
    n = len(items)
    cur = []

    def rec():
        if len(cur) == n:
            yield tuple(cur)
            return
        for k in keys:
            if counts[k]:
                counts[k] -= 1
                cur.append(k)
                yield from rec()
                cur.pop()
                counts[k] += 1

    yield from rec()


def wick_expectation(A, exps, coeff=1) -> Fraction:
    """Integral of coeff * x^exps against the normalised Gaussian exp(-(x, Ax)/2).

    Evaluates 1/(2^{n/2} (n/2)!) sum_{s in S_n} A^{i_s1 i_s2} ... A^{i_s(n-1) i_sn}
    by grouping the permutations that give the same index sequence: each
    distinct arrangement of the multiset of indices occurs prod(mult!) times.
    """
    A = [[Fraction(x) for x in row] for row in A]
    d = len(A)
    if len(exps) != d:
        raise DimensionMismatchError("monomial and matrix dimensions differ")
    if not is_symmetric(A):
        raise DomainError("A must be symmetric")
    try:
        Ainv = inverse(A)
    except DomainError:
        raise DomainError("A is singular") from None
    if not is_positive_definite(A):
        raise DomainError("A must be positive-definite")
    n = sum(exps)
    if n % 2:
        return Fraction(0)
    den = 1
    for row in Ainv:
        for x in row:
            den = lcm(den, x.denominator)
    M = [[int(x * den) for x in row] for row in Ainv]
    idx = [i for i, e in enumerate(exps) for _ in range(e)]
    mult = 1
    for e in exps:
        mult *= factorial(e)
    total = 0
    for arr in _multiset_arrangements(idx):
        p = 1
        for k in range(0, n, 2):
            p *= M[arr[k]][arr[k + 1]]
            if not p:
                break
        total += p
    h = n // 2
    return Fraction(coeff) * Fraction(total * mult, 2**h * factorial(h) * den**h)


def gauss_hermite_expectation(A, exps, nodes=None) -> float:
    """Float oracle: tensor Gauss-Hermite quadrature after x = L z with L L^T = A^{-1}."""
    import numpy as np
    from numpy.polynomial.hermite_e import hermegauss

    A = np.array([[float(Fraction(x)) for x in row] for row in A])
    d = A.shape[0]
    L = np.linalg.cholesky(np.linalg.inv(A))
    deg = sum(exps)
    m = nodes or deg // 2 + 2
    z, w = hermegauss(m)
    w = w / np.sqrt(2 * np.pi)
    grids = np.array(list(product(range(m), repeat=d)))
    Z = z[grids]  # points x d
    W = np.prod(w[grids], axis=1)
    X = Z @ L.T
    vals = np.prod(X ** np.array(exps), axis=1)
    return float(np.sum(W * vals))


# effective interactions


def _check_interaction(I: HbarSeries):
    first = I.coefficients[0]
    o = first.order()
    if o is not None and o < 3:
        raise DomainError("interaction must be at least cubic modulo hbar")


def _weight_truncate(J: HbarSeries, top: int) -> HbarSeries:
    """Drop hbar^k x^m with 2k + |m| > top."""
    out = []
    for k, c in enumerate(J.coefficients):
        out.append(TruncSeries(c.nvars, c.cutoff, {e: v for e, v in c.terms.items() if 2 * k + sum(e) <= top}))
    return HbarSeries(J.hbar_cutoff, out)


def effective_interaction(I: HbarSeries, P, hbar_cutoff: int | None = None, degree_cutoff: int | None = None) -> Interaction:
    """I' with e^{I'/hbar} = e^{hbar d_P} e^{I/hbar}, truncated.

    Computed from the flow J(t) with e^{J(t)/hbar} = e^{t hbar d_P} e^{I/hbar},
    dJ/dt = hbar d_P J + 1/2 sum P_ab d_a J d_b J, by Picard iteration on
    polynomials in t. A term hbar^k x^m has weight 2k + |m|; because I is at
    least cubic mod hbar the flow never lowers weight, so working with weight
    <= degree_cutoff + 2*hbar_cutoff is exact for the requested window.
    """
    _check_interaction(I)
    H = I.hbar_cutoff if hbar_cutoff is None else hbar_cutoff
    D = I.coefficients[0].cutoff if degree_cutoff is None else degree_cutoff
    n = I.coefficients[0].nvars
    P = _as_matrix(P, n)
    half_P = [[x / 2 for x in row] for row in P]
    W = D + 2 * H
    coeffs = [(I.coefficients[h] if h < len(I.coefficients) else I.coefficients[0] * 0).extend(max(W, I.coefficients[0].cutoff)).truncate(W) for h in range(H + 1)]
    J0 = _weight_truncate(HbarSeries(H, coeffs), W)
    if all(not x for row in P for x in row):
        return Interaction(H, [c.with_cutoff(D) for c in J0.coefficients])

    # J(t) = sum_j t^j T[j]
    T = [J0]
    for _ in range(W + H + 2):
        # evaluate the right-hand side on the polynomial in t
        rhs_terms = {}
        # linear part: hbar d_P T[j] contributes t^j
        zero = J0.map(lambda c: c * 0)
        for j, Tj in enumerate(T):
            lin = HbarSeries(H, [zero.coefficients[0]] + [contract(P, Tj.coefficients[h]) for h in range(H)])
            rhs_terms[j] = rhs_terms.get(j, zero) + lin
        for j1, A in enumerate(T):
            ga = [[c.derive(a) for a in range(n)] for c in A.coefficients]
            for j2, B in enumerate(T):
                gb = ga if j1 == j2 else [[c.derive(a) for a in range(n)] for c in B.coefficients]
                out = [zero.coefficients[0]] * (H + 1)
                for h1 in range(H + 1):
                    for h2 in range(H + 1 - h1):
                        acc = zero.coefficients[0]
                        for a in range(n):
                            if ga[h1][a].is_zero():
                                continue
                            for b in range(n):
                                p = half_P[a][b]
                                if p and not gb[h2][b].is_zero():
                                    acc = acc + (ga[h1][a] * gb[h2][b]).scale(p)
                        out[h1 + h2] = out[h1 + h2] + acc
                rhs_terms[j1 + j2] = rhs_terms.get(j1 + j2, zero) + HbarSeries(H, out)
        newT = [J0]
        for j in sorted(rhs_terms):
            term = _weight_truncate(rhs_terms[j].scale(Fraction(1, j + 1)), W)
            while len(newT) <= j + 1:
                newT.append(zero)
            newT[j + 1] = newT[j + 1] + term
        while len(newT) > 1 and newT[-1].is_zero():
            newT.pop()
        if newT == T:
            break
        T = newT
    else:
        raise RuntimeError("effective interaction iteration did not stabilise")
    total = T[0]
    for Tj in T[1:]:
        total = total + Tj
    return Interaction(H, [c.with_cutoff(D) for c in total.coefficients])
