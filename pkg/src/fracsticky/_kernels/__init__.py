"""Backend dispatch for the per-path sequential kernels.

A compiled Cython extension is preferred when the build produced one; a pure
numpy implementation with identical draw-consumption order is the fallback.
``FRAC_STICKY_BACKEND`` in the environment ("cython" or "numpy") forces the
choice; asking for cython when the extension is absent is an import error
rather than a silent downgrade.
"""

from __future__ import annotations

import os

from . import numpy_backend

_forced = os.environ.get("FRAC_STICKY_BACKEND", "").strip().lower()

if _forced == "numpy":
    _impl = numpy_backend
    BACKEND = "numpy"
elif _forced == "cython":
    from . import _cy as _impl  # noqa: F401  (ImportError here is intentional)

    BACKEND = "cython"
elif _forced:
    raise ImportError(f"FRAC_STICKY_BACKEND must be 'cython' or 'numpy', got {_forced!r}")
else:
    try:
        from . import _cy as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = numpy_backend
        BACKEND = "numpy"

reflect_window = _impl.reflect_window
hat_chain_chunk = _impl.hat_chain_chunk
interval_reflect_window = _impl.interval_reflect_window

__all__ = [
    "BACKEND",
    "reflect_window",
    "hat_chain_chunk",
    "interval_reflect_window",
    "numpy_backend",
]
