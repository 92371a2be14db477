"""Backend selection for the point-counting loops.

The compiled extension is used when it was built; otherwise the numpy
implementation. Setting ``QMJAC_PURE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _fallback

if os.environ.get("QMJAC_PURE_PYTHON", "") not in ("", "0"):
    backend = _fallback
    BACKEND = "numpy"
else:
    try:
        from . import _kernels as backend  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        backend = _fallback
        BACKEND = "numpy"

square_table = backend.square_table
character_sum = backend.character_sum


def get_backend(name: str | None = None):
    """Return the module implementing ``name`` ("cython" or "numpy")."""
    if name in (None, BACKEND):
        return backend
    if name == "numpy":
        return _fallback
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
