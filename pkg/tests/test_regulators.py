import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sigma_forge.errors import DomainError
from sigma_forge.regulators import DivergentValue, EPS, L, Scale, eigen_propagator, heat_kernel_coincident, tadpole_integral
from strategies import ratios

dvals = st.builds(
    DivergentValue,
    ratios,
    ratios,
    st.dictionaries(st.sampled_from(["1", "log L", "1/L"]), ratios, max_size=3),
)


def test_heat_kernel_values():
    assert heat_kernel_coincident(1) == 1
    assert heat_kernel_coincident(2) == Fraction(1, 2)
    assert heat_kernel_coincident("3/2") == Fraction(2, 3)
    assert heat_kernel_coincident("eps") == DivergentValue(1, 0)
    assert heat_kernel_coincident(L) == DivergentValue(0, 0, {"1/L": 1})
    for bad in (0, -1, "-1/2"):
        with pytest.raises(DomainError):
            heat_kernel_coincident(bad)


def test_tadpole():
    t = tadpole_integral(EPS, L)
    assert t == DivergentValue(0, 1)
    assert tadpole_integral("eps", "eps").is_zero()
    assert tadpole_integral("L", "L").is_zero()
    v = tadpole_integral(1, "e").evaluate(1.0, math.e)
    assert v == pytest.approx(1 / (4 * math.pi), rel=1e-12)
    assert f"{v:.7f}" == "0.0795775"
    assert tadpole_integral(EPS, L).evaluate(1.0, math.e) == pytest.approx(1 / (4 * math.pi))


@pytest.mark.parametrize("mid", ["M", 3, "1/2", "L"])
def test_tadpole_additivity(mid):
    assert tadpole_integral(EPS, mid) + tadpole_integral(mid, L) == tadpole_integral(EPS, L)


def test_tadpole_numeric_window():
    t = tadpole_integral(2, 8)
    assert t.is_finite()
    assert t.evaluate(1.0, 1.0) == pytest.approx(math.log(4) / (4 * math.pi))
    with pytest.raises(DomainError):
        tadpole_integral(3, 2)


def test_scale_parsing():
    assert Scale.of("eps") == EPS
    assert Scale.of("3/4").value == Fraction(3, 4)
    with pytest.raises(DomainError):
        Scale.of(0)


@given(dvals, dvals, ratios)
def test_channel_module_laws(a, b, c):
    assert a + b == b + a
    assert (a + b).scale(c) == a.scale(c) + b.scale(c)
    assert (a - a).is_zero()
    if a.is_finite() and b.is_finite():
        assert (a + b).is_finite()


def test_record_rendering():
    v = DivergentValue(Fraction(-1, 2), 3, {"log L": 1})
    assert v.to_record() == {"inv_eps": "-1/2", "log": "3", "finite": "1*[log L]"}


def test_eigen_propagator_windows():
    assert eigen_propagator([1, 2], Fraction(3, 2)).diagonal == [0, Fraction(1, 2)]
    assert eigen_propagator([1, 2], 0).diagonal == [1, Fraction(1, 2)]
    p = eigen_propagator([1, 2, 3], 0, 1) + eigen_propagator([1, 2, 3], 1, 2)
    assert p == eigen_propagator([1, 2, 3], 0, 2)
    assert p.matrix() == [[1, 0, 0], [0, Fraction(1, 2), 0], [0, 0, 0]]
    with pytest.raises(DomainError):
        eigen_propagator([1, 0], 0)
    with pytest.raises(DomainError):
        eigen_propagator([1, 2], 2, 1)
    with pytest.raises(DomainError):
        eigen_propagator([1, 2], 0, 1) + eigen_propagator([1, 2], 2, 3)


@given(st.lists(st.integers(1, 9), min_size=1, max_size=5), st.integers(0, 4), st.integers(5, 10))
def test_propagator_additivity_property(eig, a, b):
    mid = Fraction(a + b, 2)
    assert eigen_propagator(eig, a, mid) + eigen_propagator(eig, mid, b) == eigen_propagator(eig, a, b)
