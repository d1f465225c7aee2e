"""Backend selection for the hot kernels.

The compiled extension is used when it was built and importable; setting
``SIGMA_FORGE_PURE_PYTHON=1`` forces the pure-Python fallback.
"""
from __future__ import annotations

import os

from sigma_forge import _kernels_py

if os.environ.get("SIGMA_FORGE_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from sigma_forge import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND
mul_terms = _impl.mul_terms
reduce_row = _impl.reduce_row
echelon = _impl.echelon
back_substitute = _impl.back_substitute


def backends():
    """All importable backends keyed by name, for cross-checking and benchmarks."""
    out = {"python": _kernels_py}
    try:
        from sigma_forge import _kernels as compiled  # type: ignore[attr-defined]
    except ImportError:
        return out
    out["cython"] = compiled
    return out
