"""Lie algebras, representations and Chevalley-Eilenberg complexes over Q.

Sign convention: the differential is the negative of the textbook one,

    (d w)(Z_0..Z_p) = -sum_i (-1)^i Z_i . w(..^i..)
                      -sum_{i<j} (-1)^{i+j} w([Z_i, Z_j], ..^i..^j..)

so d_0(m)(Z) = -Z.m and a 1-cochain c is closed iff
Z.c(Z') - Z'.c(Z) - c([Z, Z']) = 0.

Cochains in degree p are indexed by (sorted p-subset S of the basis, module
index m); the flat column index is ``subset_position * module_dim + m``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
import json

from sigma_forge.algebra.linalg import identity, mat_mul, mat_sub, nullspace, rank, solve_affine
from sigma_forge.algebra.series import TruncSeries, monomials_upto
from sigma_forge.errors import DomainError, PreconditionError


class LieAlgebraData:
    """Structure constants T^c_{ab} with [e_a, e_b] = sum_c T^c_{ab} e_c."""

    def __init__(self, dim: int, structure_constants, basis_labels=None, name="g", check=True):
        self.dim = dim
        self.name = name
        self.basis_labels = list(basis_labels or [f"e{a}" for a in range(dim)])
        if len(self.basis_labels) != dim:
            raise ValueError("one label per basis element is required")
        br = {}
        for (a, b, c), v in dict(structure_constants).items():
            v = Fraction(v)
            if v:
                br.setdefault((a, b), {})[c] = v
        self._br = br
        if check:
            self.check_antisymmetry()
            if self.jacobi_residual():
                raise DomainError("structure constants violate the Jacobi identity")

    @property
    def structure_constants(self):
        return {(a, b, c): v for (a, b), row in self._br.items() for c, v in row.items()}

    def bracket(self, a: int, b: int) -> dict:
        return self._br.get((a, b), {})

    def bracket_vec(self, x, y):
        """Bracket of two coefficient vectors."""
        out = [Fraction(0)] * self.dim
        for a, xa in enumerate(x):
            if not xa:
                continue
            for b, yb in enumerate(y):
                if yb:
                    for c, v in self.bracket(a, b).items():
                        out[c] += xa * yb * v
        return out

    def check_antisymmetry(self):
        for (a, b), row in self._br.items():
            other = self._br.get((b, a), {})
            if any(other.get(c, 0) != -v for c, v in row.items()) or any(row.get(c, 0) != -v for c, v in other.items()):
                raise DomainError(f"structure constants not antisymmetric at ({a}, {b})")

    def jacobi_residual(self) -> int:
        """Number of (a, b, c, d) where the Jacobi sum is nonzero."""
        bad = 0
        for a in range(self.dim):
            for b in range(a + 1, self.dim):
                for c in range(b + 1, self.dim):
                    acc = {}
                    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
                        for e, t in self.bracket(x, y).items():
                            for d, s in self.bracket(e, z).items():
                                acc[d] = acc.get(d, 0) + t * s
                    bad += sum(1 for v in acc.values() if v)
        return bad

    def element(self, label: str):
        """(index, sign) for a label; reversed labels such as "Z_21" give sign -1."""
        if label in self.basis_labels:
            return self.basis_labels.index(label), 1
        if label.startswith("Z_"):
            body = label[2:]
            parts = body.split(",") if "," in body else list(body)
            if len(parts) == 2:
                rev = "Z_" + ("," if "," in body else "").join(reversed(parts))
                if rev in self.basis_labels:
                    return self.basis_labels.index(rev), -1
        raise KeyError(label)

    def is_subalgebra(self, indices) -> bool:
        s = set(indices)
        return all(c in s for a in s for b in s for c in self.bracket(a, b))


def _so_matrix(N, a, b):
    m = [[Fraction(0)] * N for _ in range(N)]
    m[a - 1][b - 1] = Fraction(1)
    m[b - 1][a - 1] = Fraction(-1)
    return m


def build_so(N: int) -> LieAlgebraData:
    """so(N) in the basis Z_ab (a < b), Z_ab <-> y^a d_b - y^b d_a.

    The linear field sum_ij M_ij y^i d_j has bracket given by the matrix
    commutator MK - KM, and Z_ab has M = E_ab - E_ba.
    """
    if N < 2:
        raise DomainError("so(N) needs N >= 2")
    from sigma_forge.target_geometry import label_name, so_labels

    labels = so_labels(N)
    pos = {ab: i for i, ab in enumerate(labels)}
    sc = {}
    for i, (a, b) in enumerate(labels):
        for j, (c, d) in enumerate(labels):
            if i == j:
                continue
            m = mat_sub(mat_mul(_so_matrix(N, a, b), _so_matrix(N, c, d)), mat_mul(_so_matrix(N, c, d), _so_matrix(N, a, b)))
            for (p, q), k in pos.items():
                if m[p - 1][q - 1]:
                    sc[i, j, k] = m[p - 1][q - 1]
    alg = LieAlgebraData(len(labels), sc, [label_name(a, b, N) for a, b in labels], name=f"so({N})")
    alg.so_N = N
    return alg


def abelian(dim: int, name=None) -> LieAlgebraData:
    return LieAlgebraData(dim, {}, name=name or f"ab({dim})")


class Representation:
    """Matrices rho(e_a) acting on a finite module; the homomorphism law is checked exactly."""

    def __init__(self, algebra: LieAlgebraData, module_dim: int, action, name="M", check=True):
        self.algebra = algebra
        self.module_dim = module_dim
        self.action = [[[Fraction(x) for x in row] for row in m] for m in action]
        self.name = name
        if len(self.action) != algebra.dim or any(len(m) != module_dim or any(len(r) != module_dim for r in m) for m in self.action):
            raise ValueError("need one module_dim x module_dim matrix per basis element")
        if check and not self.is_homomorphism():
            raise DomainError(f"action on {name} is not a Lie algebra homomorphism")

    def is_homomorphism(self) -> bool:
        g, A, d = self.algebra, self.action, self.module_dim
        for a in range(g.dim):
            for b in range(a + 1, g.dim):
                lhs = mat_sub(mat_mul(A[a], A[b]), mat_mul(A[b], A[a]))
                for c, t in g.bracket(a, b).items():
                    lhs = [[lhs[i][j] - t * A[c][i][j] for j in range(d)] for i in range(d)]
                if any(x for row in lhs for x in row):
                    return False
        return True

    def invariants(self):
        """Basis of the joint kernel of all rho(e_a)."""
        rows = [row for m in self.action for row in m]
        return nullspace(rows, self.module_dim)


def trivial_rep(g: LieAlgebraData, dim: int = 1) -> Representation:
    return Representation(g, dim, [[[0] * dim for _ in range(dim)] for _ in range(g.dim)], name=f"trivial{dim}")


def standard_rep(g: LieAlgebraData) -> Representation:
    N = getattr(g, "so_N", None)
    if N is None:
        raise DomainError("standard_rep is defined for so(N) built by build_so")
    from sigma_forge.target_geometry import so_labels

    return Representation(g, N, [_so_matrix(N, a, b) for a, b in so_labels(N)], name="standard")


def adjoint_rep(g: LieAlgebraData) -> Representation:
    mats = []
    for a in range(g.dim):
        m = [[Fraction(0)] * g.dim for _ in range(g.dim)]
        for b in range(g.dim):
            for c, v in g.bracket(a, b).items():
                m[c][b] = v
        mats.append(m)
    return Representation(g, g.dim, mats, name="adjoint")


def direct_sum(r1: Representation, r2: Representation) -> Representation:
    d1, d2 = r1.module_dim, r2.module_dim
    mats = []
    for A, B in zip(r1.action, r2.action):
        m = [[Fraction(0)] * (d1 + d2) for _ in range(d1 + d2)]
        for i in range(d1):
            m[i][:d1] = A[i]
        for i in range(d2):
            m[d1 + i][d1:] = B[i]
        mats.append(m)
    return Representation(r1.algebra, d1 + d2, mats, name=f"{r1.name}+{r2.name}")


def tensor_rep(r1: Representation, r2: Representation) -> Representation:
    d1, d2 = r1.module_dim, r2.module_dim
    I1, I2 = identity(d1), identity(d2)
    mats = []
    for A, B in zip(r1.action, r2.action):
        m = [[A[i][k] * I2[j][l] + I1[i][k] * B[j][l] for k in range(d1) for l in range(d2)] for i in range(d1) for j in range(d2)]
        mats.append(m)
    return Representation(r1.algebra, d1 * d2, mats, name=f"{r1.name}x{r2.name}")


def sym2_rep(r: Representation) -> Representation:
    """Symmetric square, basis e_i e_j (i <= j)."""
    d = r.module_dim
    pairs = [(i, j) for i in range(d) for j in range(i, d)]
    pos = {p: k for k, p in enumerate(pairs)}
    mats = []
    for A in r.action:
        m = [[Fraction(0)] * len(pairs) for _ in pairs]
        for col, (i, j) in enumerate(pairs):
            # A(e_i e_j) = (A e_i) e_j + e_i (A e_j)
            for k in range(d):
                if A[k][i]:
                    m[pos[tuple(sorted((k, j)))]][col] += A[k][i]
                if A[k][j]:
                    m[pos[tuple(sorted((i, k)))]][col] += A[k][j]
        mats.append(m)
    return Representation(r.algebra, len(pairs), mats, name=f"Sym2({r.name})")


def dual_rep(r: Representation) -> Representation:
    d = r.module_dim
    return Representation(r.algebra, d, [[[-A[j][i] for j in range(d)] for i in range(d)] for A in r.action], name=f"{r.name}*")


def conjugated_rep(r: Representation, P) -> Representation:
    """P^{-1} rho P for an invertible change of basis P."""
    from sigma_forge.algebra.linalg import inverse

    Pi = inverse(P)
    return Representation(r.algebra, r.module_dim, [mat_mul(mat_mul(Pi, A), P) for A in r.action], name=f"{r.name}'")


def restrict_rep(r: Representation, indices, sub: LieAlgebraData | None = None) -> Representation:
    """Restriction to the subalgebra spanned by the given basis elements."""
    g = r.algebra
    idx = list(indices)
    if not g.is_subalgebra(idx):
        raise DomainError("indices do not span a subalgebra")
    if sub is None:
        pos = {a: i for i, a in enumerate(idx)}
        sc = {(pos[a], pos[b], pos[c]): v for a in idx for b in idx for c, v in g.bracket(a, b).items()}
        sub = LieAlgebraData(len(idx), sc, [g.basis_labels[a] for a in idx], name=f"sub({g.name})")
    return Representation(sub, r.module_dim, [r.action[a] for a in idx], name=r.name)


# Chevalley-Eilenberg complex


def _subsets(dim, p):
    return list(combinations(range(dim), p))


def ce_differential(p: int, rep: Representation):
    """Sparse matrix (list of row dicts) of d_p: C^p -> C^{p+1}."""
    g = rep.algebra
    if not 0 <= p <= g.dim:
        raise DomainError(f"degree {p} out of range 0..{g.dim}")
    d = rep.module_dim
    src = {S: k for k, S in enumerate(_subsets(g.dim, p))}
    tgt = _subsets(g.dim, p + 1)
    rows = [dict() for _ in range(len(tgt) * d)]
    for t_pos, T in enumerate(tgt):
        for i, ti in enumerate(T):
            U = T[:i] + T[i + 1:]
            base = src[U] * d
            sgn = -(-1) ** i
            A = rep.action[ti]
            for mo in range(d):
                row = rows[t_pos * d + mo]
                for mi in range(d):
                    if A[mo][mi]:
                        row[base + mi] = row.get(base + mi, 0) + sgn * A[mo][mi]
        for i in range(len(T)):
            for j in range(i + 1, len(T)):
                rest = T[:i] + T[i + 1:j] + T[j + 1:]
                for c, t in g.bracket(T[i], T[j]).items():
                    if c in rest:
                        continue
                    S = tuple(sorted(rest + (c,)))
                    pos = S.index(c)
                    coef = -(-1) ** (i + j) * t * (-1) ** pos
                    base = src[S] * d
                    for m in range(d):
                        row = rows[t_pos * d + m]
                        row[base + m] = row.get(base + m, 0) + coef
    return [{k: v for k, v in r.items() if v} for r in rows]


def cochain_dim(rep: Representation, p: int) -> int:
    from math import comb

    return comb(rep.algebra.dim, p) * rep.module_dim


def _sparse_compose(A, B, ncols_b):
    """A.B for sparse row lists (A rows over B's row space)."""
    out = []
    for ra in A:
        acc = {}
        for k, v in ra.items():
            for j, w in B[k].items():
                acc[j] = acc.get(j, 0) + v * w
        out.append({j: v for j, v in acc.items() if v})
    return out


def d_squared_is_zero(rep: Representation, p: int) -> bool:
    if p + 1 > rep.algebra.dim:
        return True
    dp = ce_differential(p, rep)
    dp1 = ce_differential(p + 1, rep)
    return all(not r for r in _sparse_compose(dp1, dp, cochain_dim(rep, p)))


@dataclass
class CochainComplexSlice:
    rep: Representation
    p: int
    d_p: list = field(repr=False)
    d_next: list | None = field(default=None, repr=False)

    def is_complex(self) -> bool:
        if self.d_next is None:
            return True
        return all(not r for r in _sparse_compose(self.d_next, self.d_p, cochain_dim(self.rep, self.p)))


def complex_slice(rep: Representation, p: int) -> CochainComplexSlice:
    nxt = ce_differential(p + 1, rep) if p + 1 <= rep.algebra.dim else None
    return CochainComplexSlice(rep, p, ce_differential(p, rep), nxt)


def cohomology_records(rep: Representation, max_degree: int | None = None):
    """One record per degree: dim_kernel, dim_image (of the incoming d) and dim_H."""
    g = rep.algebra
    top = g.dim if max_degree is None else min(max_degree, g.dim)
    ranks = {}

    def rk(p):
        if p < 0 or p > g.dim:
            return 0
        if p not in ranks:
            ranks[p] = rank(ce_differential(p, rep)) if p < g.dim else 0
        return ranks[p]

    out = []
    for p in range(top + 1):
        ker = cochain_dim(rep, p) - rk(p)
        img = rk(p - 1)
        out.append({"algebra": g.name, "module": rep.name, "degree": p, "dim_kernel": ker, "dim_image": img, "dim_H": ker - img})
    return out


def cohomology_dims(rep: Representation, max_degree: int | None = None):
    return [r["dim_H"] for r in cohomology_records(rep, max_degree)]


def euler_characteristic_check(rep: Representation) -> bool:
    dims = cohomology_dims(rep)
    chi_c = sum((-1) ** p * cochain_dim(rep, p) for p in range(rep.algebra.dim + 1))
    return chi_c == sum((-1) ** p * h for p, h in enumerate(dims))


def records_json(records) -> str:
    return json.dumps(records, sort_keys=True, indent=2) + "\n"


# degree-1 cocycles


def matrix_cocycle_space(rep: Representation, vanish_on=()):
    """Closed 1-cochains vanishing on the given basis elements, as vectors in C^1."""
    g, d = rep.algebra, rep.module_dim
    if vanish_on and not g.is_subalgebra(vanish_on):
        raise DomainError("vanish_on_subalgebra is not closed under the bracket")
    rows = ce_differential(1, rep)
    for a in vanish_on:
        for m in range(d):
            rows.append({a * d + m: 1})
    return nullspace(rows, g.dim * d)


@dataclass
class JetCocycleSpace:
    """Solutions c: g -> vector-field jets, listed per basis element not in h."""

    algebra: LieAlgebraData
    cutoff: int
    basis: list  # each: dict basis index -> VectorFieldJet
    equations_checked: int
    trusted_degree: dict = field(default_factory=dict)

    @property
    def dimension(self):
        return len(self.basis)


def _field_lag(X) -> int:
    """How many top degrees of [X, V] are unreliable when V is known up to the cutoff."""
    comps = [X[i] for i in range(X.nvars)]
    if any(c.constant_term for c in comps):
        return 1
    if any((c.degree() or 0) >= X.cutoff for c in comps):
        return 1
    return 0


def _bracket_with_monomial(X, j, exps, cutoff):
    """[X, y^exps d_j] as a list of component series."""
    n = X.nvars
    mono = TruncSeries.monomial(n, cutoff, exps)
    out = []
    for l in range(n):
        s = X.apply(mono) if l == j else TruncSeries.zero(n, cutoff)
        dX = X[l].derive(j)
        if not dX.is_zero():
            s = s - dX.shift(exps)
        out.append(s)
    return out


def cocycle_space(algebra: LieAlgebraData, fields, cutoff: int, constraints=None) -> JetCocycleSpace:
    """Degree-1 cocycles of ``algebra`` with values in vector-field jets.

    ``fields`` are the jets of rho(e_a); the module action is Z.V = [rho(Z), V].
    ``constraints`` may contain:
      vanish_on_subalgebra: basis indices where c is forced to 0 (must close);
      direction: {basis index: allowed component indices} for c(e_a);
      equivariant_under: basis indices h for which Z.c(Z') = c([Z, Z']) is also
        imposed for every Z' (already implied by closedness, kept for clarity).
    Equations of degree above ``cutoff - lag`` are dropped, where the lag is 1
    for fields whose bracket lowers degree (nonzero constant term).
    """
    constraints = dict(constraints or {})
    h = list(constraints.get("vanish_on_subalgebra", ()))
    if h and not algebra.is_subalgebra(h):
        raise DomainError("vanish_on_subalgebra is not closed under the bracket")
    direction = constraints.get("direction", {})
    equiv = list(constraints.get("equivariant_under", ()))
    n = fields[0].nvars
    fields = [f.truncate(cutoff) if f.cutoff != cutoff else f for f in fields]
    monos = monomials_upto(n, cutoff)
    # unknowns
    unknowns = []
    for a in range(algebra.dim):
        if a in h:
            continue
        comps = direction.get(a, range(n))
        for j in comps:
            for e in monos:
                unknowns.append((a, j, e))
    col = {u: k for k, u in enumerate(unknowns)}
    lag = [_field_lag(f) for f in fields]

    # action of each field on each unknown basis vector, cached
    cache = {}

    def act(z, u):
        key = (z, u)
        if key not in cache:
            _, j, e = u
            cache[key] = _bracket_with_monomial(fields[z], j, e, cutoff)
        return cache[key]

    def cocycle_rows(a, b):
        """Rows of Z_a.c(Z_b) - Z_b.c(Z_a) - c([Z_a, Z_b]) (component, monomial)."""
        # a field only costs trusted degrees when it acts on a nonzero unknown
        top = cutoff - max(lag[a] if b not in h else 0, lag[b] if a not in h else 0)
        acc = {}

        def add(l, exps, k, v):
            if sum(exps) <= top:
                r = acc.setdefault((l, exps), {})
                r[k] = r.get(k, 0) + v

        for u in unknowns:
            k = col[u]
            if u[0] == b:
                for l, s in enumerate(act(a, u)):
                    for exps, v in s.terms.items():
                        add(l, exps, k, v)
            if u[0] == a:
                for l, s in enumerate(act(b, u)):
                    for exps, v in s.terms.items():
                        add(l, exps, k, -v)
            t = algebra.bracket(a, b).get(u[0])
            if t:
                add(u[1], u[2], k, -t)
        return [{k: v for k, v in r.items() if v} for r in acc.values()], top

    rows = []
    trusted = {}
    for a in range(algebra.dim):
        for b in range(a + 1, algebra.dim):
            r, top = cocycle_rows(a, b)
            rows.extend(r)
            trusted[a, b] = top
    for z in equiv:
        for b in range(algebra.dim):
            if b != z:
                r, _ = cocycle_rows(z, b)
                rows.extend(r)
    rows = [r for r in rows if r]
    sols = nullspace(rows, len(unknowns))
    from sigma_forge.target_geometry import VectorFieldJet

    basis = []
    for v in sols:
        comps = {}
        for k, x in enumerate(v):
            if x:
                a, j, e = unknowns[k]
                comps.setdefault(a, {}).setdefault(j, {})[e] = x
        entry = {}
        for a in range(algebra.dim):
            if a in h:
                continue
            cj = comps.get(a, {})
            entry[a] = VectorFieldJet(n, cutoff, {(j,): TruncSeries(n, cutoff, t) for j, t in cj.items()}, algebra.basis_labels[a])
        basis.append(entry)
    return JetCocycleSpace(algebra, cutoff, basis, len(rows), trusted)


def cocycle_residual(algebra: LieAlgebraData, fields, c: dict, cutoff: int) -> int:
    """Number of nonzero coefficients in the closedness condition (trusted degrees only)."""
    from sigma_forge.target_geometry import VectorFieldJet, lie_bracket

    n = fields[0].nvars
    zero = VectorFieldJet(n, cutoff)

    def val(a):
        return c.get(a, zero)

    bad = 0
    for a in range(algebra.dim):
        for b in range(a + 1, algebra.dim):
            r = lie_bracket(fields[a], val(b)) - lie_bracket(fields[b], val(a))
            for k, t in algebra.bracket(a, b).items():
                r = r - val(k).scale(t)
            top = cutoff - max(_field_lag(fields[a]) if b in c else 0, _field_lag(fields[b]) if a in c else 0)
            bad += sum(1 for i in range(n) for e, v in r[i].terms.items() if sum(e) <= top and v)
    return bad


# invariant tensor jets


@dataclass
class ExtensionResult:
    jet: object | None
    consistent: bool
    unique: bool
    first_obstruction: int | None = None
    free_parameters: int = 0


def invariant_jet_extension(fiber_value, fields, cutoff: int) -> ExtensionResult:
    """Solve L_X g = 0 for a symmetric 2-tensor jet with g(p) = fiber_value.

    Fields vanishing at p span the isotropy subalgebra; their linear parts
    must preserve ``fiber_value``. The system is solved degree by degree:
    at degree d the unknowns are the degree-d coefficients, constrained by
    the degree d-1 part of L_X g for fields with a constant term and by the
    degree-d part for fields vanishing at p. Free parameters, if any, are set
    to zero and reported.
    """
    from sigma_forge.target_geometry import TensorJet, lie_derivative_metric

    n = fields[0].nvars
    fv = [[Fraction(x) for x in row] for row in fiber_value]
    for i in range(n):
        for j in range(n):
            if fv[i][j] != fv[j][i]:
                raise PreconditionError("fiber value is not symmetric")
    iso = [f for f in fields if not any(f[i].constant_term for i in range(n))]
    trans = [f for f in fields if any(f[i].constant_term for i in range(n))]
    for f in iso:
        A = f.linear_part()
        # (L_X g)(p) = A^T g + g A for X = A y
        for i in range(n):
            for j in range(n):
                v = sum((fv[k][j] * A[k][i] + fv[i][k] * A[k][j] for k in range(n)), Fraction(0))
                if v:
                    raise PreconditionError(f"fiber value is not invariant under {f.label or 'an isotropy field'}")
    fields = [f.truncate(cutoff) if f.cutoff != cutoff else f for f in fields]
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    comps = {p: TruncSeries.constant(n, cutoff, fv[p[0]][p[1]]) for p in pairs}
    free_total = 0
    from sigma_forge.algebra.series import monomials

    for d in range(1, cutoff + 1):
        monos = monomials(n, d)
        unknowns = [(p, e) for p in pairs for e in monos]
        base = TensorJet(n, cutoff, "sym2_covariant", comps)
        # linear map: unknown -> L_X of that basis tensor
        rows_by_eq = {}
        rhs_by_eq = {}
        for fi, f in enumerate(iso + trans):
            deg = d if fi < len(iso) else d - 1
            lb = lie_derivative_metric(f, base)
            for p in pairs:
                for e, v in lb[p].terms.items():
                    if sum(e) == deg:
                        rhs_by_eq[(fi, p, e)] = -v
            for k, (q, e) in enumerate(unknowns):
                t = TensorJet(n, cutoff, "sym2_covariant", {q: TruncSeries.monomial(n, cutoff, e)})
                lt = lie_derivative_metric(f, t)
                for p in pairs:
                    for e2, v in lt[p].terms.items():
                        if sum(e2) == deg:
                            rows_by_eq.setdefault((fi, p, e2), {})[k] = v
        keys = sorted(set(rows_by_eq) | set(rhs_by_eq), key=repr)
        rows = [rows_by_eq.get(k, {}) for k in keys]
        rhs = [rhs_by_eq.get(k, 0) for k in keys]
        x = solve_affine(rows, rhs, len(unknowns))
        if x is None:
            return ExtensionResult(None, False, False, first_obstruction=d)
        free_total += len(unknowns) - rank(rows)
        for k, (q, e) in enumerate(unknowns):
            if x[k]:
                comps[q] = comps[q] + TruncSeries.monomial(n, cutoff, e, x[k])
    from sigma_forge.target_geometry import MetricJet

    try:
        jet = MetricJet(n, cutoff, comps, "other")
    except DomainError:
        jet = TensorJet(n, cutoff, "sym2_covariant", comps)
    return ExtensionResult(jet, True, free_total == 0, None, free_total)
