from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sigma_forge.errors import DomainError, PreconditionError
from sigma_forge.lie_cohomology import (
    LieAlgebraData,
    Representation,
    abelian,
    adjoint_rep,
    build_so,
    ce_differential,
    cochain_dim,
    cocycle_residual,
    cocycle_space,
    cohomology_dims,
    cohomology_records,
    conjugated_rep,
    d_squared_is_zero,
    direct_sum,
    dual_rep,
    euler_characteristic_check,
    invariant_jet_extension,
    matrix_cocycle_space,
    records_json,
    standard_rep,
    sym2_rep,
    tensor_rep,
    trivial_rep,
)
from sigma_forge.sigma_oneloop import sphere_cocycle_constraints
from sigma_forge.target_geometry import VectorFieldJet, lie_derivative_metric, rotation_fields, sphere_graph_metric


def test_so_brackets():
    g = build_so(3)
    a, b = g.element("Z_12")[0], g.element("Z_23")[0]
    c = g.element("Z_13")[0]
    assert g.bracket(a, b) == {c: 1}
    g4 = build_so(4)
    assert g4.bracket(g4.element("Z_12")[0], g4.element("Z_34")[0]) == {}
    assert build_so(2).structure_constants == {}
    assert build_so(5).dim == 10
    with pytest.raises(DomainError):
        build_so(1)


def test_element_reversed_label():
    g = build_so(3)
    idx, sign = g.element("Z_31")
    assert g.basis_labels[idx] == "Z_13" and sign == -1


def test_bad_structure_constants_rejected():
    with pytest.raises(DomainError):
        LieAlgebraData(2, {(0, 1, 0): 1, (1, 0, 0): 1})
    # antisymmetric but not Jacobi: [e0,e1]=e2, [e1,e2]=e0, [e0,e2]=e2
    sc = {(0, 1, 2): 1, (1, 0, 2): -1, (1, 2, 0): 1, (2, 1, 0): -1, (0, 2, 2): 1, (2, 0, 2): -1}
    with pytest.raises(DomainError):
        LieAlgebraData(3, sc)


def test_representation_axiom_checked():
    g = build_so(3)
    std = standard_rep(g)
    bad = [[[2 * x for x in row] for row in m] for m in std.action]
    with pytest.raises(DomainError):
        Representation(g, 3, bad)


def test_trivial_abelian_differential_zero():
    g = abelian(3)
    rep = trivial_rep(g)
    for p in range(4):
        assert all(not row for row in ce_differential(p, rep))


def test_d0_sign_on_adjoint():
    g = build_so(3)
    rep = adjoint_rep(g)
    d0 = ce_differential(0, rep)
    # d_0(m)(Z_a) = -rho(Z_a) m; column index m, row a*dim + i
    for a in range(3):
        for i in range(3):
            row = d0[a * 3 + i] if isinstance(d0, list) else d0.get(a * 3 + i, {})
            for m in range(3):
                assert row.get(m, 0) == -rep.action[a][i][m]
    assert cohomology_dims(rep)[0] == 0


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("module", ["trivial", "standard", "adjoint"])
def test_d_squared_zero(N, module):
    g = build_so(N)
    rep = {"trivial": trivial_rep, "standard": standard_rep, "adjoint": adjoint_rep}[module](g)
    for p in range(g.dim):
        assert d_squared_is_zero(rep, p)


def _battery(g):
    std = standard_rep(g)
    return {
        "trivial": trivial_rep(g),
        "standard": std,
        "adjoint": adjoint_rep(g),
        "sym2": sym2_rep(std),
        "std+triv": direct_sum(std, trivial_rep(g, 2)),
        "dual": dual_rep(std),
    }


@pytest.mark.parametrize("N", [3, 4])
def test_whitehead_vanishing(N):
    g = build_so(N)
    for name, rep in _battery(g).items():
        dims = cohomology_dims(rep)
        assert dims[1] == 0 and dims[2] == 0, name
        assert euler_characteristic_check(rep)


def test_so3_tensor_module():
    g = build_so(3)
    std = standard_rep(g)
    rep = tensor_rep(std, std)
    dims = cohomology_dims(rep)
    # std (x) std = 1 + 3 + 5: one invariant, and H^3 pairs with H^0
    assert dims == [1, 0, 0, 1]


def test_known_dims():
    assert cohomology_dims(trivial_rep(build_so(3))) == [1, 0, 0, 1]
    assert cohomology_dims(trivial_rep(build_so(4))) == [1, 0, 0, 2, 0, 0, 1]
    assert cohomology_dims(trivial_rep(build_so(2))) == [1, 1]
    assert cohomology_dims(standard_rep(build_so(3))) == [0, 0, 0, 0]
    assert cohomology_dims(sym2_rep(standard_rep(build_so(3)))) == [1, 0, 0, 1]


def test_records_shape():
    recs = cohomology_records(adjoint_rep(build_so(3)))
    assert [r["degree"] for r in recs] == [0, 1, 2, 3]
    assert set(recs[0]) == {"algebra", "module", "degree", "dim_kernel", "dim_image", "dim_H"}
    for r in recs:
        assert r["dim_H"] == r["dim_kernel"] - r["dim_image"]
    assert records_json(recs).endswith("\n")


def test_cochain_dim():
    g = build_so(4)
    assert [cochain_dim(standard_rep(g), p) for p in range(7)] == [4, 24, 60, 80, 60, 24, 4]


@settings(max_examples=15)
@given(st.lists(st.integers(-2, 2), min_size=25, max_size=25).filter(lambda v: v[0] or v[6] or v[12] or v[18] or v[24]))
def test_conjugated_random_module_d_squared(entries):
    """so(4) on a 5-dim module rho = P (std + trivial) P^{-1} for random invertible P."""
    g = build_so(4)
    base = direct_sum(standard_rep(g), trivial_rep(g))
    P = [[Fraction(entries[5 * i + j]) + (3 if i == j else 0) * 5 for j in range(5)] for i in range(5)]
    rep = conjugated_rep(base, P)
    assert rep.is_homomorphism()
    assert d_squared_is_zero(rep, 0) and d_squared_is_zero(rep, 1)
    assert cohomology_dims(rep, 2) == [1, 0, 0]


def test_matrix_cocycle_space_abelian():
    g = abelian(2)
    rep = trivial_rep(g, 3)
    assert len(matrix_cocycle_space(rep)) == 6
    assert len(matrix_cocycle_space(rep, vanish_on=[0])) == 3


# jet cocycles


@pytest.mark.parametrize("N", [3, 4])
def test_sphere_cocycle_space_dimension_one(N):
    R = rotation_fields(N, 4)
    g = build_so(N)
    space = cocycle_space(g, R.fields, 4, sphere_cocycle_constraints(R))
    assert space.dimension == 1
    assert cocycle_residual(g, R.fields, space.basis[0], 4) == 0


def test_sphere_cocycle_space_low_cutoff():
    R = rotation_fields(3, 2)
    space = cocycle_space(build_so(3), R.fields, 2, sphere_cocycle_constraints(R))
    assert space.dimension == 1


def test_unconstrained_abelian_trivial_action():
    g = abelian(2)
    fields = [VectorFieldJet(2, 2) for _ in range(2)]
    # every assignment is a cocycle: dim g * nvars * #monomials(deg <= 2)
    assert cocycle_space(g, fields, 2).dimension == 2 * 2 * 6


def test_constraint_must_be_subalgebra():
    R = rotation_fields(3, 2)
    with pytest.raises(DomainError):
        cocycle_space(build_so(3), R.fields, 2, {"vanish_on_subalgebra": list(R.h_perp)})


def test_residual_detects_broken_cocycle():
    R = rotation_fields(3, 4)
    g = build_so(3)
    space = cocycle_space(g, R.fields, 4, sphere_cocycle_constraints(R))
    c = dict(space.basis[0])
    a = R.h_perp[0]
    c[a] = c[a].scale(2)
    assert cocycle_residual(g, R.fields, c, 4) > 0


# invariant extension


@pytest.mark.parametrize("N", [3, 4])
def test_extension_reproduces_round_metric(N):
    R = rotation_fields(N, 6)
    n = N - 1
    delta = [[int(i == j) for j in range(n)] for i in range(n)]
    res = invariant_jet_extension(delta, R.fields, 6)
    assert res.consistent
    g = sphere_graph_metric(N, 6)
    assert res.jet.components() == g.components()
    # order-2 coefficient of g_00 carries +y_0^2
    assert g[0, 0].coefficient((2,) + (0,) * (n - 1)) == 1


def test_extension_linear_and_zero():
    R = rotation_fields(3, 4)
    three = invariant_jet_extension([[3, 0], [0, 3]], R.fields, 4).jet
    assert three.components() == sphere_graph_metric(3, 4).scale(3).components()
    zero = invariant_jet_extension([[0, 0], [0, 0]], R.fields, 4)
    assert zero.jet.is_zero()


def test_extension_is_invariant():
    R = rotation_fields(4, 5)
    jet = invariant_jet_extension([[1, 0, 0], [0, 1, 0], [0, 0, 1]], R.fields, 5).jet
    for Z in R.fields:
        L = lie_derivative_metric(Z, jet)
        for s in L.components().values():
            assert all(sum(e) >= 5 for e in s.terms)


def test_extension_rejects_non_invariant_fiber():
    R = rotation_fields(3, 4)
    with pytest.raises(PreconditionError, match="Z_12"):
        invariant_jet_extension([[1, 0], [0, 2]], R.fields, 4)
