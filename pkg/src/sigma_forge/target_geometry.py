"""Jets of metrics and vector fields on a target manifold near a base point p.

All tensors are stored as truncated series in the coordinates ``y`` centred
at p. The sphere S^{N-1} is described in graph coordinates (the chart
``y -> (y, sigma(y))`` with ``sigma = sqrt(1 - |y|^2)``) or in Riemann normal
coordinates.

Curvature convention: R^r_{s m v} = d_m G^r_{v s} - d_v G^r_{m s}
+ G^r_{m l} G^l_{v s} - G^r_{v l} G^l_{m s} and Ric_{s v} = R^r_{s r v},
so the unit round sphere has Ric = (n - 1) g.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from sigma_forge.algebra.linalg import inverse
from sigma_forge.algebra.series import TruncSeries, norm_squared, rational_power, series_transcendental
from sigma_forge.errors import DimensionMismatchError, DomainError, PreconditionError

KINDS = ("sym2_covariant", "vector", "scalar")
CHARTS = ("graph", "normal", "other")


def _indices(kind, n):
    if kind == "sym2_covariant":
        return [(i, j) for i in range(n) for j in range(i, n)]
    if kind == "vector":
        return [(i,) for i in range(n)]
    return [()]


class TensorJet:
    """Series-valued tensor with its index symmetry enforced.

    ``components`` maps index tuples to TruncSeries. For ``sym2_covariant``
    either triangle may be given; if both (i, j) and (j, i) appear they must
    agree. Missing components are zero.
    """

    __slots__ = ("nvars", "cutoff", "kind", "_comp")

    def __init__(self, nvars: int, cutoff: int, kind: str, components: Mapping | None = None):
        if kind not in KINDS:
            raise ValueError(f"unknown tensor kind {kind!r}")
        self.nvars = nvars
        self.cutoff = cutoff
        self.kind = kind
        zero = TruncSeries.zero(nvars, cutoff)
        comp = {idx: zero for idx in _indices(kind, nvars)}
        for idx, s in (components or {}).items():
            idx = (idx,) if isinstance(idx, int) else tuple(idx)
            if not isinstance(s, TruncSeries):
                s = TruncSeries.constant(nvars, cutoff, s)
            if (s.nvars, s.cutoff) != (nvars, cutoff):
                raise DimensionMismatchError(f"component {idx} has shape ({s.nvars}, {s.cutoff})")
            key = tuple(sorted(idx)) if kind == "sym2_covariant" else idx
            if key not in comp:
                raise DimensionMismatchError(f"index {idx} invalid for {kind} in {nvars} variables")
            if kind == "sym2_covariant" and idx != key and idx in (components or {}) and key in (components or {}):
                if components[key] != s:
                    raise DomainError(f"asymmetric components at {key}")
            comp[key] = s
        self._comp = comp

    @classmethod
    def _raw(cls, nvars, cutoff, kind, comp):
        obj = object.__new__(cls)
        obj.nvars, obj.cutoff, obj.kind, obj._comp = nvars, cutoff, kind, comp
        return obj

    def _like(self, comp):
        out = object.__new__(type(self))
        out.nvars, out.cutoff, out.kind, out._comp = self.nvars, self.cutoff, self.kind, comp
        for extra in getattr(type(self), "__extra__", ()):
            setattr(out, extra, getattr(self, extra))
        return out

    def __getitem__(self, idx):
        if isinstance(idx, int):
            idx = (idx,)
        if self.kind == "sym2_covariant":
            idx = tuple(sorted(idx))
        return self._comp[idx]

    def components(self):
        return dict(self._comp)

    def _check(self, other):
        if (self.nvars, self.cutoff, self.kind) != (other.nvars, other.cutoff, other.kind):
            raise DimensionMismatchError("tensor jets differ in shape")

    def __add__(self, other):
        self._check(other)
        return self._like({k: v + other._comp[k] for k, v in self._comp.items()})

    def __sub__(self, other):
        self._check(other)
        return self._like({k: v - other._comp[k] for k, v in self._comp.items()})

    def __neg__(self):
        return self._like({k: -v for k, v in self._comp.items()})

    def scale(self, factor):
        return self._like({k: v.scale(factor) for k, v in self._comp.items()})

    def times(self, f: TruncSeries):
        """Multiply every component by the scalar series ``f``."""
        return self._like({k: v * f for k, v in self._comp.items()})

    def map(self, fn):
        return self._like({k: fn(v) for k, v in self._comp.items()})

    def truncate(self, cutoff: int):
        out = self._like({k: v.truncate(cutoff) for k, v in self._comp.items()})
        out.cutoff = cutoff
        return out

    def is_zero(self):
        return all(v.is_zero() for v in self._comp.values())

    def at_origin(self):
        """Constant term: a matrix (sym2), a list (vector) or a scalar."""
        n = self.nvars
        if self.kind == "sym2_covariant":
            return [[self[i, j].constant_term for j in range(n)] for i in range(n)]
        if self.kind == "vector":
            return [self[i].constant_term for i in range(n)]
        return self[()].constant_term

    def __eq__(self, other):
        if not isinstance(other, TensorJet):
            return NotImplemented
        return (self.nvars, self.cutoff, self.kind) == (other.nvars, other.cutoff, other.kind) and self._comp == other._comp

    __hash__ = None

    def to_record(self):
        return {",".join(map(str, k)) or "_": v.to_text() for k, v in sorted(self._comp.items()) if not v.is_zero()}

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in sorted(self._comp.items()) if not v.is_zero())
        return f"{type(self).__name__}({self.kind}, nvars={self.nvars}, cutoff={self.cutoff}, {{{body}}})"


class MetricJet(TensorJet):
    __slots__ = ("chart",)
    __extra__ = ("chart",)

    def __init__(self, nvars, cutoff, components=None, chart="other"):
        super().__init__(nvars, cutoff, "sym2_covariant", components)
        if chart not in CHARTS:
            raise ValueError(f"unknown chart {chart!r}")
        self.chart = chart
        g0 = self.at_origin()
        if not _positive_definite(g0):
            raise DomainError("metric constant term is not positive-definite")
        if chart == "normal":
            if any(g0[i][j] != int(i == j) for i in range(nvars) for j in range(nvars)):
                raise DomainError("normal chart needs g(p) = identity")
            if any(not v.homogeneous(1).is_zero() for v in self._comp.values()):
                raise DomainError("normal chart needs vanishing first derivatives at p")

    @classmethod
    def from_tensor(cls, t: TensorJet, chart="other"):
        return cls(t.nvars, t.cutoff, t.components(), chart)


class VectorFieldJet(TensorJet):
    __slots__ = ("label",)
    __extra__ = ("label",)

    def __init__(self, nvars, cutoff, components=None, label=None):
        super().__init__(nvars, cutoff, "vector", components)
        self.label = label

    @classmethod
    def from_list(cls, comps, label=None):
        c0 = comps[0]
        return cls(c0.nvars, c0.cutoff, {(i,): c for i, c in enumerate(comps)}, label)

    def apply(self, f: TruncSeries) -> TruncSeries:
        """Directional derivative X(f) = X^l d_l f."""
        out = TruncSeries.zero(self.nvars, self.cutoff)
        for l in range(self.nvars):
            if not self[l].is_zero():
                out = out + self[l] * f.derive(l)
        return out

    def linear_part(self):
        """Matrix A with X = A y + O(y^2) componentwise: A[k][l] = d_l X^k (0)."""
        n = self.nvars
        return [[self[k].coefficient(tuple(int(m == l) for m in range(n))) for l in range(n)] for k in range(n)]


def _positive_definite(m):
    from sigma_forge.algebra.linalg import is_positive_definite

    return is_positive_definite(m)


def scalar_jet(f: TruncSeries) -> TensorJet:
    return TensorJet(f.nvars, f.cutoff, "scalar", {(): f})


# sphere data


def sigma_series(N: int, cutoff: int) -> TruncSeries:
    """sigma = (1 - |y|^2)^(1/2) in the N-1 graph coordinates."""
    if cutoff < 2:
        raise ValueError("sigma_series needs cutoff >= 2")
    n = N - 1
    return rational_power(1 - norm_squared(n, cutoff), Fraction(1, 2))


def sphere_graph_metric(N: int, cutoff: int) -> MetricJet:
    if N < 2 or cutoff < 2:
        raise ValueError("sphere_graph_metric needs N >= 2 and cutoff >= 2")
    n = N - 1
    geo = series_transcendental(1 - norm_squared(n, cutoff), "inverse")
    comps = {}
    for i in range(n):
        for j in range(i, n):
            e = [0] * n
            e[i] += 1
            e[j] += 1
            s = geo.shift(tuple(e))
            if i == j:
                s = s + 1
            comps[i, j] = s
    return MetricJet(n, cutoff, comps, "graph")


def _sin2_over_u(cutoff):
    """Coefficients of s(u) = sin^2(sqrt u)/u as a univariate list up to u^cutoff."""
    out = []
    fact = Fraction(1)
    facts = [Fraction(1)]
    for m in range(1, 2 * cutoff + 6):
        fact *= m
        facts.append(fact)
    for m in range(1, cutoff + 2):
        out.append(Fraction((-1) ** (m + 1) * 2 ** (2 * m - 1)) / facts[2 * m])
    return out


def sphere_normal_metric(N: int, cutoff: int) -> MetricJet:
    """Round metric dr^2 + sin^2 r dOmega^2 in Riemann normal coordinates."""
    if N < 3 or cutoff < 4:
        raise ValueError("sphere_normal_metric needs N >= 3 and cutoff >= 4")
    n = N - 1
    r2 = norm_squared(n, cutoff)
    s = _sin2_over_u(cutoff // 2 + 1)
    # s(u) = sum_m s[m] u^m ; t(u) = (1 - s(u))/u = -sum_{m>=1} s[m] u^(m-1)
    s_ser = TruncSeries.zero(n, cutoff)
    t_ser = TruncSeries.zero(n, cutoff)
    power = TruncSeries.constant(n, cutoff, 1)
    for m in range(cutoff // 2 + 1):
        s_ser = s_ser + power.scale(s[m])
        t_ser = t_ser - power.scale(s[m + 1])
        power = power * r2
    comps = {}
    for i in range(n):
        for j in range(i, n):
            e = [0] * n
            e[i] += 1
            e[j] += 1
            c = t_ser.shift(tuple(e))
            if i == j:
                c = c + s_ser
            comps[i, j] = c
    return MetricJet(n, cutoff, comps, "normal")


def flat_metric(n: int, cutoff: int, chart="normal") -> MetricJet:
    return MetricJet(n, cutoff, {(i, i): TruncSeries.constant(n, cutoff, 1) for i in range(n)}, chart)


def block_metric(a: MetricJet, b: MetricJet, chart=None) -> MetricJet:
    """Product metric on the product of the two targets (block-diagonal jets)."""
    if a.cutoff != b.cutoff:
        raise DimensionMismatchError("block_metric needs equal cutoffs")
    n, m, k = a.nvars, b.nvars, a.cutoff

    def embed(s, offset):
        return TruncSeries(n + m, k, {((0,) * offset + e + (0,) * (n + m - offset - len(e))): c for e, c in s.terms.items()})

    comps = {}
    for (i, j), s in a.components().items():
        comps[i, j] = embed(s, 0)
    for (i, j), s in b.components().items():
        comps[n + i, n + j] = embed(s, n)
    if chart is None:
        chart = a.chart if a.chart == b.chart else "other"
    return MetricJet(n + m, k, comps, chart)


# curvature


def _series_matrix_inverse(g: TensorJet):
    """g^{-1} as a matrix of series, via a Neumann series around g(p)^{-1}."""
    n, k = g.nvars, g.cutoff
    g0 = g.at_origin()
    try:
        g0inv = inverse(g0)
    except DomainError:
        raise DomainError("metric is degenerate at p") from None
    # h = g - g0 ; g^{-1} = sum_m (-g0^{-1} h)^m g0^{-1}
    h = [[g[i, j] - g0[i][j] for j in range(n)] for i in range(n)]
    zero = TruncSeries.zero(n, k)
    a = [[sum((h[l][j].scale(-g0inv[i][l]) for l in range(n)), zero) for j in range(n)] for i in range(n)]
    term = [[TruncSeries.constant(n, k, g0inv[i][j]) for j in range(n)] for i in range(n)]
    total = term
    for _ in range(k):
        term = [[sum((a[i][l] * term[l][j] for l in range(n)), zero) for j in range(n)] for i in range(n)]
        if all(t.is_zero() for row in term for t in row):
            break
        total = [[total[i][j] + term[i][j] for j in range(n)] for i in range(n)]
    return total


def inverse_metric(g: TensorJet):
    return _series_matrix_inverse(g)


def christoffel(g: TensorJet):
    """G[k][i][j] = 1/2 g^{kl}(d_i g_jl + d_j g_il - d_l g_ij); exact below cutoff - 1."""
    n = g.nvars
    ginv = _series_matrix_inverse(g)
    dg = [[[g[i, j].derive(l) for l in range(n)] for j in range(n)] for i in range(n)]
    zero = TruncSeries.zero(n, g.cutoff)
    lower = [[[(dg[j][l][i] + dg[i][l][j] - dg[i][j][l]).scale(Fraction(1, 2)) for l in range(n)] for j in range(n)] for i in range(n)]
    return [[[sum((ginv[k][l] * lower[i][j][l] for l in range(n)), zero) for j in range(n)] for i in range(n)] for k in range(n)]


@dataclass
class Curvature:
    christoffel: list
    riemann: dict = field(repr=False)
    ricci: list = field(default_factory=list)


def curvature(metric: TensorJet) -> Curvature:
    n = metric.nvars
    if metric.cutoff < 2:
        raise ValueError("curvature needs cutoff >= 2")
    G = christoffel(metric)
    unit = [tuple(int(a == b) for a in range(n)) for b in range(n)]
    G0 = [[[G[k][i][j].constant_term for j in range(n)] for i in range(n)] for k in range(n)]
    dG = [[[[G[k][i][j].coefficient(unit[m]) for m in range(n)] for j in range(n)] for i in range(n)] for k in range(n)]
    riem = {}
    for r in range(n):
        for s in range(n):
            for m in range(n):
                for v in range(n):
                    val = dG[r][v][s][m] - dG[r][m][s][v]
                    for l in range(n):
                        val += G0[r][m][l] * G0[l][v][s] - G0[r][v][l] * G0[l][m][s]
                    if val:
                        riem[r, s, m, v] = val
    ric = [[sum((riem.get((r, s, r, v), Fraction(0)) for r in range(n)), Fraction(0)) for v in range(n)] for s in range(n)]
    return Curvature(G, riem, ric)


def trace_second_derivatives(metric: MetricJet):
    """sum_k d_k d_k g_ij at p, a constant symmetric matrix."""
    if getattr(metric, "chart", None) != "normal":
        raise PreconditionError("trace_second_derivatives needs a normal-chart metric")
    if metric.cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    n = metric.nvars
    sq = [tuple(2 * int(a == b) for a in range(n)) for b in range(n)]
    return [[sum((2 * metric[i, j].coefficient(sq[k]) for k in range(n)), Fraction(0)) for j in range(n)] for i in range(n)]


def proportionality(a, b):
    """Scalar c with a = c*b for constant matrices; None when both vanish.

    Raises DomainError if a is not a multiple of b.
    """
    c = None
    for ra, rb in zip(a, b):
        for x, y in zip(ra, rb):
            if y:
                r = Fraction(x) / y
                if c is None:
                    c = r
                elif c != r:
                    raise DomainError("tensors are not proportional")
    if c is None:
        if any(x for row in a for x in row):
            raise DomainError("tensors are not proportional")
        return None
    if any(Fraction(x) != c * y for ra, rb in zip(a, b) for x, y in zip(ra, rb)):
        raise DomainError("tensors are not proportional")
    return c


# vector fields


def so_labels(N: int):
    """Canonical so(N) basis labels (a, b) with a < b, 1-based, in lexicographic order."""
    return [(a, b) for a in range(1, N + 1) for b in range(a + 1, N + 1)]


def label_name(a: int, b: int, N: int) -> str:
    return f"Z_{a}{b}" if N < 10 else f"Z_{a},{b}"


@dataclass
class RotationFields:
    N: int
    fields: list  # VectorFieldJet per canonical basis element
    h: list  # indices spanning the isotropy subalgebra
    h_perp: list
    sigma: TruncSeries

    def by_label(self, label):
        for f in self.fields:
            if f.label == label:
                return f
        raise KeyError(label)

    def z_n(self, i: int) -> VectorFieldJet:
        """Z_{N i} = sigma d_i (the reversed canonical label, so minus the stored field)."""
        f = -self.fields[self.h_perp[i - 1]]
        f.label = f"Z_N{i}" if self.N < 10 else f"Z_N,{i}"
        return f


def rotation_fields(N: int, cutoff: int) -> RotationFields:
    """Jets at p = (0, ..., 0, 1) of the so(N) rotation fields on S^{N-1}.

    Z_ab = y^a d_b - y^b d_a with the last ambient coordinate y^N = sigma,
    projected onto the graph chart; so Z_aN = -sigma d_a.
    """
    if N < 2:
        raise DomainError("rotation_fields needs N >= 2")
    n = N - 1
    sig = sigma_series(N, max(cutoff, 2)).with_cutoff(cutoff) if cutoff >= 2 else None
    fields, h, hp = [], [], []
    for idx, (a, b) in enumerate(so_labels(N)):
        comps = {}
        if b < N:
            comps[b - 1,] = TruncSeries.variable(n, cutoff, a - 1)
            comps[a - 1,] = -TruncSeries.variable(n, cutoff, b - 1)
            h.append(idx)
        else:
            comps[a - 1,] = -sig
            hp.append(idx)
        fields.append(VectorFieldJet(n, cutoff, comps, label_name(a, b, N)))
    return RotationFields(N, fields, h, hp, sig)


def lie_bracket(X: VectorFieldJet, Y: VectorFieldJet) -> VectorFieldJet:
    """[X, Y]^j = X(Y^j) - Y(X^j)."""
    X._check(Y)
    return VectorFieldJet(X.nvars, X.cutoff, {(j,): X.apply(Y[j]) - Y.apply(X[j]) for j in range(X.nvars)})


def lie_derivative_metric(V: VectorFieldJet, g: TensorJet) -> TensorJet:
    """(L_V g)_ij = V(g_ij) + g_kj d_i V^k + g_ik d_j V^k."""
    if (V.nvars, V.cutoff) != (g.nvars, g.cutoff) or g.kind != "sym2_covariant":
        raise DimensionMismatchError("lie_derivative_metric needs a vector jet and a sym2 jet of the same shape")
    n = g.nvars
    dV = [[V[k].derive(i) for i in range(n)] for k in range(n)]
    comps = {}
    for i in range(n):
        for j in range(i, n):
            s = V.apply(g[i, j])
            for k in range(n):
                if not dV[k][i].is_zero():
                    s = s + g[k, j] * dV[k][i]
                if not dV[k][j].is_zero():
                    s = s + g[i, k] * dV[k][j]
            comps[i, j] = s
    return TensorJet(n, g.cutoff, "sym2_covariant", comps)


def lie_derivative(V: VectorFieldJet, t: TensorJet) -> TensorJet:
    """Lie derivative of a scalar, vector or sym2 jet."""
    if t.kind == "scalar":
        return scalar_jet(V.apply(t[()]))
    if t.kind == "vector":
        return lie_bracket(V, t if isinstance(t, VectorFieldJet) else VectorFieldJet(t.nvars, t.cutoff, t.components()))
    return lie_derivative_metric(V, t)


def euler_field(n: int, cutoff: int, coeff=1) -> VectorFieldJet:
    return VectorFieldJet(n, cutoff, {(i,): TruncSeries.variable(n, cutoff, i).scale(coeff) for i in range(n)}, "E")
