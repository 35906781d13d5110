"""Propagation kernels with a compiled core and a pure-Python fallback.

The compiled Cython extension is used when present; setting the
environment variable ``LCSYNC_PURE_PYTHON=1`` forces the numpy/scipy
fallback.  Both backends expose the same functions and agree to
floating-point roundoff given identical inputs (including pregenerated
noise), which the test suite checks directly.
"""

from __future__ import annotations

import os

from ._ops import KernelOps, PackedCsr, pack_csr

if os.environ.get("LCSYNC_PURE_PYTHON", "") == "1":
    from . import _pure as _backend
else:
    try:
        from . import _compiled as _backend  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure as _backend

lindblad_apply = _backend.lindblad_apply
rk4_run = _backend.rk4_run
rk4_sample_states = _backend.rk4_sample_states
rk4_sample_expect = _backend.rk4_sample_expect
sme_heterodyne = _backend.sme_heterodyne


def backend_name() -> str:
    """Name of the active kernel backend ("compiled" or "pure-python")."""
    return _backend.BACKEND


__all__ = [
    "KernelOps",
    "PackedCsr",
    "pack_csr",
    "backend_name",
    "lindblad_apply",
    "rk4_run",
    "rk4_sample_states",
    "rk4_sample_expect",
    "sme_heterodyne",
]
