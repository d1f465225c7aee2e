"""Hypothesis strategies shared by the property tests."""
from fractions import Fraction

from hypothesis import strategies as st

from sigma_forge.algebra.series import TruncSeries, monomials_upto

ratios = st.builds(Fraction, st.integers(-12, 12), st.integers(1, 7))


@st.composite
def series(draw, nvars=2, cutoff=4, zero_constant=False, max_terms=6):
    mons = [m for m in monomials_upto(nvars, cutoff) if not (zero_constant and sum(m) == 0)]
    picked = draw(st.lists(st.sampled_from(mons), max_size=max_terms, unique=True))
    return TruncSeries(nvars, cutoff, {m: draw(ratios) for m in picked})


@st.composite
def unit_series(draw, nvars=2, cutoff=4):
    s = draw(series(nvars, cutoff, zero_constant=True))
    c = draw(ratios.filter(bool))
    return s + c
