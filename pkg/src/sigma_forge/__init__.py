"""Exact truncated-jet verification engine for one-loop sigma-model computations."""

__version__ = "0.1.0"

from sigma_forge.algebra import HbarSeries, TruncSeries  # noqa: E402
from sigma_forge.errors import (  # noqa: E402
    ConfigError,
    DimensionMismatchError,
    DomainError,
    PreconditionError,
    SigmaForgeError,
)

__all__ = [
    "ConfigError",
    "DimensionMismatchError",
    "DomainError",
    "HbarSeries",
    "PreconditionError",
    "SigmaForgeError",
    "TruncSeries",
    "__version__",
]
