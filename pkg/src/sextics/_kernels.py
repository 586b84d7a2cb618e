"""Selects the compiled scan kernels when available, else the pure-Python ones."""
from __future__ import annotations

import os

from . import _scan_py

try:
    if os.environ.get("SEXTICS_PURE_PYTHON"):
        raise ImportError
    from . import _scan as _impl  # type: ignore[attr-defined]
    BACKEND = "cython"
except ImportError:  # pragma: no cover - depends on the build
    _impl = _scan_py
    BACKEND = "python"


def scan_cyclic(weights, p: int) -> list[tuple[int, ...]]:
    return sorted(_impl.scan_cyclic(list(weights), p))
