from fractions import Fraction

import pytest

from sigma_forge.algebra import TruncSeries
from sigma_forge.algebra.series import norm_squared, series_transcendental
from sigma_forge.errors import DomainError, PreconditionError
from sigma_forge.lie_cohomology import build_so
from sigma_forge.regulators import DivergentValue
from sigma_forge.sigma_oneloop import (
    LocalVertexDensity,
    amputated_potential,
    beta_report,
    classical_master_residual,
    deformation_dimension,
    flat_toy_deformation_dimension,
    isotropy_representation,
    log_sigma,
    metric_counterterm_check,
    one_loop_log_coefficient,
    sigma_m2,
    sphere_identity_I,
    vector_counterterm,
    wheel_counterterm,
    wheel_sum,
)
from sigma_forge.target_geometry import (
    MetricJet,
    TensorJet,
    block_metric,
    curvature,
    flat_metric,
    rotation_fields,
    sphere_graph_metric,
    sphere_normal_metric,
)


def test_density_kinds():
    LocalVertexDensity("function_type", TensorJet(2, 2, "scalar"))
    with pytest.raises(DomainError):
        LocalVertexDensity("metric_type", TensorJet(2, 2, "vector"))
    with pytest.raises(ValueError):
        LocalVertexDensity("ghost_type", TensorJet(2, 2, "scalar"))


# classical master equation


def test_cme_round_sphere():
    for N in (2, 3, 4):
        r = classical_master_residual(N, 6)
        assert (r.invariance, r.homomorphism, r.jacobi) == (0, 0, 0)


def test_cme_detects_perturbation():
    g = sphere_graph_metric(3, 6)
    comps = g.components()
    comps[0, 0] = comps[0, 0] + TruncSeries.monomial(2, 6, (2, 0))
    r = classical_master_residual(3, 6, MetricJet(2, 6, comps, "graph"))
    assert r.invariance > 0 and not r.ok
    assert r.witness is not None


# identity (I)


def test_amputated_potential():
    r2 = norm_squared(2, 2)
    assert amputated_potential(3, 2) == -r2
    F = amputated_potential(3, 6)
    assert series_transcendental(1 - F, "inverse") == 1 - norm_squared(2, 6)
    y = TruncSeries.variable(1, 4, 0)
    assert amputated_potential(2, 4) == -(y * y) - y**4
    with pytest.raises(ValueError):
        amputated_potential(3, 3)


def test_wheel_sum_low_order():
    r2 = norm_squared(2, 4)
    W = wheel_sum(amputated_potential(3, 4))
    assert W == r2.scale(Fraction(-1, 2)) - (r2 * r2).scale(Fraction(1, 4))
    assert W == log_sigma(3, 4)


@pytest.mark.parametrize("N", [3, 4, 5])
@pytest.mark.parametrize("k", [4, 6, 8])
def test_identity_I(N, k):
    w = sphere_identity_I(N, k)
    assert w.ok
    assert w.wheel == log_sigma(N, k)
    assert w.entry.channel == DivergentValue(-1, 0)


def test_identity_I_flat_and_errors():
    w = wheel_counterterm(TruncSeries.zero(2, 4))
    assert w.wheel.is_zero() and w.ok
    with pytest.raises(DomainError):
        wheel_counterterm(TruncSeries.constant(2, 4, 1))


def test_identity_I_detects_wrong_counterterm():
    """A counterterm with the wrong normalisation breaks identity (I)."""
    N, k = 3, 6
    F = amputated_potential(N, k).scale(2)
    R = rotation_fields(N, k)
    w = wheel_counterterm(F, [R.z_n(i) for i in range(1, N)])
    assert not w.ok


# identity (II)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_identity_II(N):
    v4 = vector_counterterm(N, 4)
    v6 = vector_counterterm(N, 6)
    for v, k in ((v4, 4), (v6, 6)):
        assert v.dimension == 1 and v.ok
        assert v.C == sigma_m2(N, k)
        assert v.density * v.density == sigma_m2(N, k)  # density = sigma^-1
    for e, c in v4.C.terms.items():
        assert v6.C.coefficient(e) == c
    assert v6.entry.channel.coeff_log == 1


def test_identity_II_generator_series():
    C = vector_counterterm(3, 6).C
    r2 = norm_squared(2, 6)
    assert C == 1 + r2 + r2 * r2 + r2 * r2 * r2


def test_identity_II_requires_N3():
    with pytest.raises(DomainError):
        vector_counterterm(2, 4)


# identity (III)


@pytest.mark.parametrize("N", [3, 4])
@pytest.mark.parametrize("lam,mu", [(1, 0), (2, 5), (Fraction(-1, 3), Fraction(7, 2)), (0, 1)])
def test_identity_III(N, lam, mu):
    m = metric_counterterm_check(N, 6, lam, mu)
    assert m.ok


def test_identity_III_low_degree_example():
    m = metric_counterterm_check(3, 4, 1, 0)
    y0, y1 = TruncSeries.variable(2, 4, 0), TruncSeries.variable(2, 4, 1)
    low = TruncSeries(2, 4, {e: c for e, c in m.lie_derivative[0, 1].terms.items() if sum(e) <= 2})
    assert low == (y0 * y1).scale(-4)


def test_identity_III_flat_and_zero():
    assert metric_counterterm_check(3, 6, 0, 3).ok
    assert metric_counterterm_check(3, 6, 2, 3, flat=True).ok


# one-loop coefficient and beta


def test_one_loop_flat_and_sphere():
    assert one_loop_log_coefficient(flat_metric(2, 4)).B == [[0, 0], [0, 0]]
    res = one_loop_log_coefficient(sphere_normal_metric(3, 4))
    assert res.B == [[Fraction(1, 3), 0], [0, Fraction(1, 3)]]
    assert res.B_12pi == [[1, 0], [0, 1]]
    res5 = one_loop_log_coefficient(sphere_normal_metric(5, 4))
    assert res5.B_12pi == [[3 if i == j else 0 for j in range(4)] for i in range(4)]
    with pytest.raises(PreconditionError):
        one_loop_log_coefficient(sphere_graph_metric(3, 4))


@pytest.mark.parametrize("N", [3, 4, 5])
def test_beta_report_sphere(N):
    rep = beta_report(sphere_normal_metric(N, 4))
    assert rep.verdict == "pass"
    assert rep.ratio == Fraction(1, 3)
    assert abs(rep.trace_ratio) == Fraction(2, 3)
    assert rep.ratio_absolute == pytest.approx(0.0265258, abs=1e-7)


def test_beta_report_flat_and_product():
    assert beta_report(flat_metric(3, 4)).verdict == "pass"
    g = block_metric(sphere_normal_metric(3, 4), sphere_normal_metric(4, 4))
    rep = beta_report(g)
    assert rep.verdict == "pass" and rep.ratio == Fraction(1, 3)
    ric = curvature(g).ricci
    assert rep.B == [[x / 3 for x in row] for row in ric]


def test_beta_report_non_proportional():
    n, k = 2, 4
    y0, y1 = TruncSeries.variable(n, k, 0), TruncSeries.variable(n, k, 1)
    # curvature with Ric not proportional to the second-derivative trace
    comps = {(0, 0): 1 - (y1 * y1).scale(Fraction(1, 3)), (0, 1): (y0 * y1).scale(Fraction(1, 3)), (1, 1): 1 - (y0 * y0).scale(Fraction(1, 3)) - (y0 * y0).scale(1)}
    rep = beta_report(MetricJet(n, k, comps, "normal"))
    assert rep.verdict == "fail" and not rep.proportional


@pytest.mark.parametrize("N", [3, 4, 5])
def test_B_commutes_with_isotropy(N):
    B = one_loop_log_coefficient(sphere_normal_metric(N, 4)).B
    alg = build_so(N)
    R = rotation_fields(N, 2)
    iso = isotropy_representation(R.fields, alg, R.h)
    for A in iso.action:
        n = len(B)
        AB = [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        BA = [[sum(B[i][k] * A[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        assert AB == BA


# deformations


@pytest.mark.parametrize("N", [3, 4, 5])
def test_deformation_dimension(N):
    assert deformation_dimension(N) == 1


def test_deformation_toy():
    for n in (1, 2, 3):
        assert flat_toy_deformation_dimension(n) == n * (n + 1) // 2 - n
    with pytest.raises(DomainError):
        deformation_dimension(2)
