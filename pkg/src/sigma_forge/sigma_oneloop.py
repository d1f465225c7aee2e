"""One-loop counterterms and the log coefficient for sigma models on spheres.

Densities are per unit volume on R^2. Divergent coefficients are carried as
:class:`~sigma_forge.regulators.DivergentValue` channels (units of 1/(4 pi)).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from sigma_forge.algebra.linalg import rank
from sigma_forge.algebra.series import TruncSeries, norm_squared, rational_power, series_substitute, series_transcendental
from sigma_forge.errors import DomainError, PreconditionError
from sigma_forge.lie_cohomology import (
    LieAlgebraData,
    Representation,
    build_so,
    cocycle_residual,
    cocycle_space,
    dual_rep,
    sym2_rep,
)
from sigma_forge.regulators import DivergentValue, heat_kernel_coincident, tadpole_integral
from sigma_forge.target_geometry import (
    MetricJet,
    TensorJet,
    VectorFieldJet,
    curvature,
    euler_field,
    lie_bracket,
    lie_derivative_metric,
    proportionality,
    rotation_fields,
    sigma_series,
    sphere_graph_metric,
    trace_second_derivatives,
)

DENSITY_KINDS = {"metric_type": "sym2_covariant", "function_type": "scalar", "vector_type": "vector"}


@dataclass
class LocalVertexDensity:
    kind: str
    coefficient: TensorJet

    def __post_init__(self):
        want = DENSITY_KINDS.get(self.kind)
        if want is None:
            raise ValueError(f"unknown density kind {self.kind!r}")
        if self.coefficient.kind != want:
            raise DomainError(f"{self.kind} density needs a {want} coefficient")


@dataclass
class CounterTermEntry:
    channel: DivergentValue
    density: LocalVertexDensity


@dataclass
class CounterTermSet:
    fun: CounterTermEntry | None = None
    vec: CounterTermEntry | None = None
    met: CounterTermEntry | None = None


def _count_nonzero(series_list, top):
    return sum(1 for s in series_list for e, c in s.terms.items() if sum(e) <= top and c)


def _first_nonzero(series_list, top):
    """The lowest-degree offending series (for reports), or None."""
    for s in series_list:
        t = TruncSeries(s.nvars, s.cutoff, {e: c for e, c in s.terms.items() if sum(e) <= top})
        if not t.is_zero():
            return t
    return None


# classical master equation


@dataclass
class CMEResult:
    invariance: int  # nonzero coefficients of L_Z g
    homomorphism: int  # nonzero coefficients of [Z_a, Z_b] - T^c_ab Z_c
    jacobi: int
    trusted_degree: int
    witness: TruncSeries | None = None

    @property
    def ok(self):
        return not (self.invariance or self.homomorphism or self.jacobi)


def classical_master_residual(N: int, cutoff: int, metric: MetricJet | None = None) -> CMEResult:
    """Invariance of the metric, the homomorphism law and Jacobi, up to cutoff - 1."""
    g = sphere_graph_metric(N, cutoff) if metric is None else metric
    alg = build_so(N)
    R = rotation_fields(N, cutoff)
    top = cutoff - 1
    inv_series = []
    for Z in R.fields:
        L = lie_derivative_metric(Z, g)
        inv_series.extend(L.components().values())
    hom_series = []
    for a in range(alg.dim):
        for b in range(a + 1, alg.dim):
            r = lie_bracket(R.fields[a], R.fields[b])
            for c, t in alg.bracket(a, b).items():
                r = r - R.fields[c].scale(t)
            hom_series.extend(r.components().values())
    return CMEResult(
        _count_nonzero(inv_series, top),
        _count_nonzero(hom_series, top),
        alg.jacobi_residual(),
        top,
        _first_nonzero(inv_series, top),
    )


# identity (I): function-type counterterm from wheels


def amputated_potential(N: int, cutoff: int) -> TruncSeries:
    """F = -|pi|^2 / (1 - |pi|^2); the denominator carries |pi|^2, not |pi|."""
    if cutoff < 2 or cutoff % 2:
        raise ValueError("amputated_potential needs an even cutoff >= 2")
    r2 = norm_squared(N - 1, cutoff)
    return -(r2 * series_transcendental(1 - r2, "inverse"))


def wheel_sum(F: TruncSeries) -> TruncSeries:
    """sum_{n>=1} F^n / (2n), the wheel diagrams with symmetry factor 2n."""
    if F.constant_term:
        raise DomainError("wheel sum needs F with zero constant term")
    outer = TruncSeries(1, F.cutoff, {(n,): Fraction(1, 2 * n) for n in range(1, F.cutoff + 1)})
    return series_substitute(outer, F)


@dataclass
class WheelResult:
    entry: CounterTermEntry
    wheel: TruncSeries
    residuals: list  # per nonlinear field: X(ct) + div X, inv_eps channel
    trusted_degree: int

    @property
    def ok(self):
        return all(_count_nonzero([r], self.trusted_degree) == 0 for r in self.residuals)


def divergence(X: VectorFieldJet) -> TruncSeries:
    out = TruncSeries.zero(X.nvars, X.cutoff)
    for l in range(X.nvars):
        out = out + X[l].derive(l)
    return out


def wheel_counterterm(F: TruncSeries, fields=()) -> WheelResult:
    """Function-type counterterm in the 1/(4 pi eps) channel and the identity (I) check.

    The wheel with n vertices contributes F^n/(2n) * K_eps(x, x); the
    counterterm cancels the sum. For each nonlinear symmetry X the residual
    X(ct) + div X must vanish, where div X is the coefficient of the
    regulated divergence of the vector field in the same channel.
    """
    W = wheel_sum(F)
    k_eps = heat_kernel_coincident("eps")
    ct = -W
    entry = CounterTermEntry(-k_eps, LocalVertexDensity("function_type", TensorJet(W.nvars, W.cutoff, "scalar", {(): W})))
    # entry density carries W with channel -1/(4 pi eps): I^CT = -(1/4 pi eps) * W
    residuals = [X.apply(ct) + divergence(X).scale(k_eps.coeff_inv_eps) for X in fields]
    return WheelResult(entry, W, residuals, F.cutoff - 1)


def sphere_identity_I(N: int, cutoff: int) -> WheelResult:
    F = amputated_potential(N, cutoff)
    R = rotation_fields(N, cutoff)
    return wheel_counterterm(F, [R.z_n(i) for i in range(1, N)])


def log_sigma(N: int, cutoff: int) -> TruncSeries:
    """log sigma = 1/2 log(1 - |y|^2), computed independently of the wheel sum."""
    return series_transcendental(-norm_squared(N - 1, cutoff), "log1p_of").scale(Fraction(1, 2))


# identity (II): vector-type counterterm


@dataclass
class VectorCTResult:
    dimension: int
    C: TruncSeries | None
    generator: dict  # basis index -> VectorFieldJet, normalised so C(p) = 1
    residual: int
    ode_residual: int
    density: TruncSeries | None
    entry: CounterTermEntry | None
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return self.dimension == 1 and self.residual == 0 and self.ode_residual == 0


def sphere_cocycle_constraints(R):
    """c vanishes on h and c(Z_Ni) points along d_i."""
    return {
        "vanish_on_subalgebra": list(R.h),
        "direction": {a: [i] for i, a in enumerate(R.h_perp)},
    }


def vector_counterterm(N: int, cutoff: int) -> VectorCTResult:
    if N < 3:
        raise DomainError("vector_counterterm needs N >= 3")
    alg = build_so(N)
    R = rotation_fields(N, cutoff)
    space = cocycle_space(alg, R.fields, cutoff, sphere_cocycle_constraints(R))
    if space.dimension == 0:
        return VectorCTResult(0, None, {}, 0, 0, None, None, ["anomaly: no solution to the constrained cocycle equations"])
    notes = []
    if space.dimension != 1:
        notes.append(f"constrained cocycle space has dimension {space.dimension}")
    c = space.basis[0]
    a1 = R.h_perp[0]
    # stored on the canonical element Z_1N = -Z_N1 = -sigma d_1
    comp = -c[a1][0]
    lead = comp.constant_term
    if not lead:
        return VectorCTResult(space.dimension, None, c, 0, 0, None, None, notes + ["generator vanishes at p"])
    c = {a: v.scale(1 / lead) for a, v in c.items()}
    A = comp.scale(1 / lead)  # c(Z_N1) = A d_1
    sig = R.sigma
    C = A * series_transcendental(sig, "inverse")
    res = cocycle_residual(alg, R.fields, c, cutoff)
    n = N - 1
    sig_m2 = series_transcendental(1 - norm_squared(n, cutoff), "inverse")
    ode = [C.derive(i) - (TruncSeries.variable(n, cutoff, i) * sig_m2 * C).scale(2) for i in range(n)]
    ode_bad = _count_nonzero(ode, cutoff - 1)
    density = C * sig
    entry = CounterTermEntry(tadpole_integral("eps", "L"), LocalVertexDensity("vector_type", VectorFieldJet(n, cutoff, {(i,): density for i in range(n)})))
    return VectorCTResult(space.dimension, C, c, res, ode_bad, density, entry, notes)


# identity (III): metric counterterm


@dataclass
class MetricCTResult:
    residual: int
    ct_residual: int
    lie_derivative: TensorJet
    trusted_degree: int

    @property
    def ok(self):
        return self.residual == 0 and self.ct_residual == 0


def _yy_tensor(n, cutoff, f: TruncSeries):
    comps = {}
    for i in range(n):
        for j in range(i, n):
            e = [0] * n
            e[i] += 1
            e[j] += 1
            comps[i, j] = f.shift(tuple(e))
    return TensorJet(n, cutoff, "sym2_covariant", comps)


def metric_counterterm_check(N: int, cutoff: int, lam=1, mu=0, flat=False) -> MetricCTResult:
    """L_W g = -2 lam (g + y_i y_j / sigma^4) for W = -lam y^i d_i, and
    mu g - 2 lam y_i y_j / sigma^4 = (mu + 2 lam) g + L_W g.

    With ``flat=True`` the target is (R^{N-1}, delta) and the y y term is absent.
    """
    lam, mu = Fraction(lam), Fraction(mu)
    n = N - 1
    if flat:
        from sigma_forge.target_geometry import flat_metric

        g = flat_metric(n, cutoff, "graph")
        yy = TensorJet(n, cutoff, "sym2_covariant")
    else:
        g = sphere_graph_metric(N, cutoff)
        sig_m4 = rational_power(1 - norm_squared(n, cutoff), -2)
        yy = _yy_tensor(n, cutoff, sig_m4)
    W = euler_field(n, cutoff, -lam)
    L = lie_derivative_metric(W, g)
    expected = (g + yy).scale(-2 * lam)
    r1 = L - expected
    ct = g.scale(mu) - yy.scale(2 * lam)
    r2 = ct - (g.scale(mu + 2 * lam) + L)
    top = cutoff - 1
    return MetricCTResult(
        _count_nonzero(r1.components().values(), top),
        _count_nonzero(r2.components().values(), top),
        L,
        top,
    )


# one-loop log coefficient and beta


@dataclass
class OneLoopCoefficient:
    B: list  # multiplies (1/4pi) log(L/eps)
    trace: list

    @property
    def B_12pi(self):
        """B in units of 1/(12 pi)."""
        return [[3 * x for x in row] for row in self.B]


def one_loop_log_coefficient(metric: MetricJet) -> OneLoopCoefficient:
    """B_ij = -1/2 sum_k g_ij,kk(p) times the tadpole log channel."""
    if getattr(metric, "chart", None) != "normal":
        raise PreconditionError("one_loop_log_coefficient needs a normal-chart metric")
    T = trace_second_derivatives(metric)
    tad = tadpole_integral("eps", "L")
    B = [[Fraction(-1, 2) * x * tad.coeff_log for x in row] for row in T]
    return OneLoopCoefficient(B, T)


@dataclass
class BetaReport:
    B: list
    ricci: list
    ratio: Fraction | None  # B = ratio * Ric, units of 1/(4 pi)
    trace_ratio: Fraction | None  # sum_k g_ij,kk = trace_ratio * Ric
    proportional: bool
    verdict: str
    notes: list = field(default_factory=list)

    @property
    def ratio_absolute(self):
        """The scalar in absolute units (divided by 4 pi), as a float."""
        import math

        return None if self.ratio is None else float(self.ratio) / (4 * math.pi)


def beta_report(metric: MetricJet) -> BetaReport:
    one = one_loop_log_coefficient(metric)
    ric = curvature(metric).ricci
    notes = []
    try:
        c = proportionality(one.B, ric)
        t = proportionality(one.trace, ric)
        prop = True
    except DomainError:
        c = t = None
        prop = False
    if not prop:
        verdict = "fail"
        notes.append("one-loop coefficient is not proportional to the Ricci tensor")
    elif c is None:
        verdict = "pass"
        notes.append("flat input: B = 0 and Ric = 0")
    elif abs(c) == Fraction(1, 3):
        verdict = "pass"
        notes.append(f"B = {c} Ric in units of (1/4pi) log(L/eps); |c| = 1/(12 pi) absolute")
        notes.append(f"implemented sign: sum_k g_ij,kk = {t} Ric")
    else:
        verdict = "fail"
        notes.append(f"unexpected proportionality constant {c}")
    return BetaReport(one.B, ric, c, t, prop, verdict, notes)


# deformations


def isotropy_representation(fields, algebra: LieAlgebraData, h) -> Representation:
    """Action of the isotropy subalgebra on T_p through the linear parts of its fields."""
    n = fields[0].nvars
    mats = []
    for a in range(algebra.dim):
        if a in h:
            A = fields[a].linear_part()
            mats.append([[-A[i][j] for j in range(n)] for i in range(n)])
        else:
            mats.append([[Fraction(0)] * n for _ in range(n)])
    sub_mats = [mats[a] for a in h]
    pos = {a: i for i, a in enumerate(h)}
    sc = {(pos[a], pos[b], pos[c]): v for a in h for b in h for c, v in algebra.bracket(a, b).items()}
    sub = LieAlgebraData(len(h), sc, [algebra.basis_labels[a] for a in h], name="h")
    return Representation(sub, n, sub_mats, name="T_p")


def deformation_dimension_from(iso: Representation, metric: TensorJet, invariant_fields) -> int:
    """dim H^0(h, Sym^2 T*_p) - rank{(L_W g)(p) : W invariant}."""
    h0_sym = len(sym2_rep(dual_rep(iso)).invariants())
    n = metric.nvars
    rows = []
    for W in invariant_fields:
        L = lie_derivative_metric(W, metric)
        rows.append([L[i, j].constant_term for i in range(n) for j in range(i, n)])
    return h0_sym - (rank(rows) if rows else 0)


def deformation_dimension(N: int) -> int:
    """Invariant metrics on S^{N-1} modulo Lie derivatives by invariant fields."""
    if N < 3:
        raise DomainError("deformation_dimension needs N >= 3")
    alg = build_so(N)
    R = rotation_fields(N, 2)
    iso = isotropy_representation(R.fields, alg, R.h)
    inv_vectors = iso.invariants()
    if inv_vectors:
        raise DomainError("invariant tangent vectors need an explicit invariant-field extension")
    return deformation_dimension_from(iso, sphere_graph_metric(N, 2), [])


def flat_toy_deformation_dimension(n: int) -> int:
    """Trivial isotropy on R^n with fields W_k = d_k + y_k d_k."""
    from sigma_forge.target_geometry import flat_metric

    cutoff = 2
    sub = LieAlgebraData(0, {}, [], name="0")
    iso = Representation(sub, n, [], name="T_p")
    fields = []
    for k in range(n):
        comp = TruncSeries.constant(n, cutoff, 1) + TruncSeries.variable(n, cutoff, k)
        fields.append(VectorFieldJet(n, cutoff, {(k,): comp}))
    return deformation_dimension_from(iso, flat_metric(n, cutoff), fields)


def sigma_m2(N: int, cutoff: int) -> TruncSeries:
    return series_transcendental(1 - norm_squared(N - 1, cutoff), "inverse")


def sigma_inverse(N: int, cutoff: int) -> TruncSeries:
    return series_transcendental(sigma_series(N, cutoff), "inverse")
