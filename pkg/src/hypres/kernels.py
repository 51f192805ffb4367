"""Backend selection for the batched kernels.

The compiled extension is used when importable; setting HYPRES_PURE_PYTHON=1
forces the numpy fallback.  ``BACKEND`` names the active choice.
"""
from __future__ import annotations

import os

from . import _kernels_py

__all__ = ["BACKEND", "boundary_batch", "poisson_transport", "poisson_accumulate", "backend_module"]


def _select():
    if os.environ.get("HYPRES_PURE_PYTHON", "") not in ("", "0"):
        return _kernels_py, "python"
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        return _kernels_py, "python"
    return _kernels, "cython"


_mod, BACKEND = _select()
boundary_batch = _mod.boundary_batch
poisson_transport = _mod.poisson_transport
poisson_accumulate = _mod.poisson_accumulate


def backend_module(name: str):
    """The kernel module for ``name`` in {"python", "cython"}."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _kernels  # type: ignore[attr-defined]
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
