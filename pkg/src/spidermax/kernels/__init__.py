"""Kernel backend selection.

The maximal-operator envelope sweep is the hot loop of the package.  A
compiled Cython core is used when available; a pure NumPy implementation of
the identical interface is the fallback.  Set SPIDERMAX_PURE=1 to force the
fallback (used by the benchmark and the backend-agreement tests).
"""
from __future__ import annotations

import os

from . import _ref

if os.environ.get("SPIDERMAX_PURE"):
    _impl = _ref
    BACKEND = "pure"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        _impl = _ref
        BACKEND = "pure"

build_tables = _impl.build_tables
compute_ray = _impl.compute_ray
eval_points = _impl.eval_points


def get_impl(backend: str | None = None):
    """Return the kernel module for an explicit backend name, or the default."""
    if backend in (None, "auto"):
        return _impl
    if backend == "pure":
        return _ref
    if backend == "compiled":
        from . import _core  # raises ImportError if not built

        return _core
    raise ValueError(f"unknown kernel backend {backend!r}")
