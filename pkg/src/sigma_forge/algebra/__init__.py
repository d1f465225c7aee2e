"""Exact series arithmetic, ℏ-graded series and rational linear algebra."""
from sigma_forge.algebra.hbar import HbarSeries
from sigma_forge.algebra.series import (
    MultiIndex,
    TruncSeries,
    format_ratio,
    monomials,
    monomials_upto,
    norm_squared,
    parse_ratio,
    rational_power,
    series_arith,
    series_derive,
    series_substitute,
    series_transcendental,
)

__all__ = [
    "HbarSeries",
    "MultiIndex",
    "TruncSeries",
    "format_ratio",
    "monomials",
    "monomials_upto",
    "norm_squared",
    "parse_ratio",
    "rational_power",
    "series_arith",
    "series_derive",
    "series_substitute",
    "series_transcendental",
]
