"""Kernel selection: compiled extension if available, NumPy otherwise.

Set INFOCONTOURS_PURE=1 to force the pure-Python path (used by the
benchmark and by parity tests).  Both backends expose the same
``svi_adam`` contract and the same math; see ``_svi_numpy`` for the
reference implementation.
"""

from __future__ import annotations

import os

from . import _svi_numpy

if os.environ.get("INFOCONTOURS_PURE", "") not in ("", "0"):
    _impl = _svi_numpy
else:
    try:
        from . import _svi_core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _svi_numpy

svi_adam = _impl.svi_adam
BACKEND_NAME = _impl.BACKEND_NAME


def available_backends() -> dict[str, object]:
    """Name -> module for every importable backend (benchmark helper)."""
    out: dict[str, object] = {"numpy": _svi_numpy}
    try:
        from . import _svi_core
        out["cython"] = _svi_core
    except ImportError:
        pass
    return out
