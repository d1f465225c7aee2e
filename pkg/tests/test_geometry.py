from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sigma_forge.algebra.series import TruncSeries, norm_squared, series_transcendental
from sigma_forge.errors import DimensionMismatchError, DomainError, PreconditionError
from sigma_forge.lie_cohomology import build_so
from sigma_forge.target_geometry import (
    MetricJet,
    TensorJet,
    VectorFieldJet,
    block_metric,
    christoffel,
    curvature,
    euler_field,
    flat_metric,
    inverse_metric,
    lie_bracket,
    lie_derivative_metric,
    proportionality,
    rotation_fields,
    sigma_series,
    sphere_graph_metric,
    sphere_normal_metric,
    trace_second_derivatives,
)
from oracles import ricci_at_origin_oracle


def y(n, k, i):
    return TruncSeries.variable(n, k, i)


def low(s, top):
    return TruncSeries(s.nvars, s.cutoff, {e: c for e, c in s.terms.items() if sum(e) <= top})


def delta(n, c=1):
    return [[Fraction(c) if i == j else Fraction(0) for j in range(n)] for i in range(n)]


# metric constructors


def test_graph_metric_examples():
    g = sphere_graph_metric(3, 2)
    for i in range(2):
        for j in range(2):
            assert g[i, j] == TruncSeries.constant(2, 2, int(i == j)) + y(2, 2, i) * y(2, 2, j)
    circle = sphere_graph_metric(2, 6)
    assert circle[0, 0] == series_transcendental(1 - y(1, 6, 0) ** 2, "inverse")
    assert sphere_graph_metric(3, 4)[1, 1].coefficient((2, 2)) == 1


def test_normal_metric_examples():
    for N in (3, 4, 5):
        g = sphere_normal_metric(N, 4)
        n = N - 1
        r2 = norm_squared(n, 4)
        for i in range(n):
            for j in range(n):
                want = (r2.scale(int(i == j)) - y(n, 4, i) * y(n, 4, j)).scale(Fraction(-1, 3))
                assert g[i, j].homogeneous(2) == want.homogeneous(2)
                assert g[i, j].homogeneous(1).is_zero()
        assert g.at_origin() == delta(n)
    assert trace_second_derivatives(sphere_normal_metric(3, 4))[0][0] == Fraction(-2, 3)


def test_normal_metric_preconditions():
    with pytest.raises(ValueError):
        sphere_normal_metric(3, 2)
    with pytest.raises(DomainError):
        MetricJet(2, 2, {(0, 0): 1 + y(2, 2, 0), (1, 1): 1}, "normal")
    with pytest.raises(DomainError):
        MetricJet(2, 2, {(0, 0): 1, (1, 1): -1})


def test_asymmetric_components_rejected():
    with pytest.raises(DomainError):
        TensorJet(2, 2, "sym2_covariant", {(0, 1): y(2, 2, 0), (1, 0): y(2, 2, 1)})
    with pytest.raises(DimensionMismatchError):
        TensorJet(2, 2, "vector", {(2,): 1})


def test_sigma_series():
    for N in (2, 3, 5):
        n = N - 1
        r2 = norm_squared(n, 2)
        assert sigma_series(N, 2) == 1 - r2.scale(Fraction(1, 2))
        s = sigma_series(N, 6)
        assert s * s + norm_squared(n, 6) == TruncSeries.constant(n, 6)
        inv2 = series_transcendental(1 - norm_squared(n, 6), "inverse")
        assert s * inv2 == series_transcendental(s, "inverse")


# curvature


def test_flat_curvature_zero():
    c = curvature(flat_metric(3, 4))
    assert all(x == 0 for row in c.ricci for x in row)
    assert trace_second_derivatives(flat_metric(3, 4)) == delta(3, 0)


@pytest.mark.parametrize("N", [3, 4, 5, 6])
def test_sphere_ricci_both_charts(N):
    n = N - 1
    for g in (sphere_graph_metric(N, 4), sphere_normal_metric(N, 4)):
        ric = curvature(g).ricci
        assert ric == delta(n, N - 2)
        assert ric == ricci_at_origin_oracle(g)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_trace_second_derivatives(N):
    T = trace_second_derivatives(sphere_normal_metric(N, 4))
    assert T == delta(N - 1, Fraction(-2, 3) * (N - 2))
    assert proportionality(T, curvature(sphere_normal_metric(N, 4)).ricci) == Fraction(-2, 3)


def test_trace_requires_normal_chart():
    with pytest.raises(PreconditionError):
        trace_second_derivatives(sphere_graph_metric(3, 4))


def test_block_metric_ricci_blockwise():
    g = block_metric(sphere_normal_metric(3, 4), sphere_normal_metric(4, 4))
    ric = curvature(g).ricci
    assert [ric[i][i] for i in range(5)] == [1, 1, 2, 2, 2]
    assert ric == ricci_at_origin_oracle(g)


def test_inverse_metric_and_christoffel():
    g = sphere_graph_metric(3, 4)
    ginv = inverse_metric(g)
    for i in range(2):
        for j in range(2):
            s = sum((g[i, k] * ginv[k][j] for k in range(2)), TruncSeries.zero(2, 4))
            assert s == TruncSeries.constant(2, 4, int(i == j))
    G = christoffel(g)
    # Gamma(p) = 0 since first derivatives vanish at p
    assert all(G[k][i][j].constant_term == 0 for k in range(2) for i in range(2) for j in range(2))
    # for g = delta + y y the degree-1 part is Gamma^k_ij = delta_ij y_k
    assert G[0][1][1].homogeneous(1) == y(2, 4, 0).homogeneous(1)


@settings(max_examples=20)
@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_ricci_oracle_random_quadratic(cs):
    """g = delta + quadratic perturbation; compare with the independent formula."""
    a, b, c = (Fraction(x, 4) for x in cs)
    n, k = 2, 3
    y0, y1 = y(n, k, 0), y(n, k, 1)
    comps = {(0, 0): 1 + (y1 * y1).scale(a), (0, 1): (y0 * y1).scale(b), (1, 1): 1 + (y0 * y0).scale(c)}
    g = MetricJet(n, k, comps)
    assert curvature(g).ricci == ricci_at_origin_oracle(g)


def test_proportionality_helper():
    assert proportionality(delta(2, 2), delta(2, 1)) == 2
    assert proportionality(delta(2, 0), delta(2, 0)) is None
    with pytest.raises(DomainError):
        proportionality([[1, 0], [0, 2]], delta(2))


# vector fields


def test_rotation_fields_split_and_labels():
    R = rotation_fields(4, 4)
    assert len(R.fields) == 6
    assert len(R.h) == 3 and len(R.h_perp) == 3
    z = R.z_n(1)
    assert z.label == "Z_N1"
    assert z[0] == sigma_series(4, 4)


@pytest.mark.parametrize("N", [3, 4])
def test_rotation_fields_preserve_metric(N):
    R = rotation_fields(N, 6)
    g = sphere_graph_metric(N, 6)
    for Z in R.fields:
        for s in lie_derivative_metric(Z, g).components().values():
            assert low(s, 5).is_zero()


@pytest.mark.parametrize("N", [3, 4])
def test_rotation_brackets_match_structure_constants(N):
    R = rotation_fields(N, 6)
    alg = build_so(N)
    for a in range(alg.dim):
        for b in range(alg.dim):
            r = lie_bracket(R.fields[a], R.fields[b])
            for c, t in alg.bracket(a, b).items():
                r = r - R.fields[c].scale(t)
            assert all(low(s, 5).is_zero() for s in r.components().values())


def test_symmetric_space_relation():
    R = rotation_fields(3, 6)
    r = lie_bracket(R.z_n(1), R.z_n(2)) + R.by_label("Z_12")
    assert all(low(s, 5).is_zero() for s in r.components().values())


def test_frame_relation():
    N, k = 4, 6
    R = rotation_fields(N, k)
    n = N - 1
    sinv = series_transcendental(sigma_series(N, k), "inverse")
    for i in range(1, N):
        for j in range(i + 1, N):
            Zij = R.by_label(f"Z_{i}{j}")
            res = Zij - R.z_n(j).times(y(n, k, i - 1) * sinv) + R.z_n(i).times(y(n, k, j - 1) * sinv)
            assert res.is_zero()


def test_lie_derivative_examples():
    E = euler_field(3, 4)
    L = lie_derivative_metric(E, flat_metric(3, 4))
    assert L.components() == flat_metric(3, 4).scale(2).components()
    W = euler_field(2, 4, -1)
    L = lie_derivative_metric(W, sphere_graph_metric(3, 4))
    for i in range(2):
        for j in range(2):
            want = TruncSeries.constant(2, 4, -2 * int(i == j)) - (y(2, 4, i) * y(2, 4, j)).scale(4)
            assert low(L[i, j], 2) == want


def test_lie_derivative_shape_mismatch():
    V = VectorFieldJet(2, 4, {(0,): 1})
    with pytest.raises(DimensionMismatchError):
        lie_derivative_metric(V, flat_metric(3, 4))
