"""Selects the compiled extension core when available, NumPy otherwise.

Set NLE_BACKEND=numpy to force the pure-NumPy implementation (used by the
benchmark and the backend-agreement tests).
"""

import os

from . import _core_numpy

_FORCED = os.environ.get("NLE_BACKEND", "").strip().lower()

if _FORCED == "numpy":
    _impl = _core_numpy
    BACKEND = "numpy"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _core_numpy
        BACKEND = "numpy"

reduce_pieces = _impl.reduce_pieces
double_diff_sum = _impl.double_diff_sum
triple_diff_sum = _impl.triple_diff_sum
sharp_sweep_1d = _impl.sharp_sweep_1d
