"""Backend selection for the hot aggregation kernels.

The compiled extension (``ordertail._core``) is preferred when importable;
otherwise the numpy fallback is used.  Both produce bit-identical float64
output.  Set ``ORDERTAIL_KERNELS=python`` or ``=compiled`` to force a
backend (``compiled`` raises if the extension is unavailable).
"""

import os

from . import _core_py

_mode = os.environ.get("ORDERTAIL_KERNELS", "auto").lower()
if _mode not in ("auto", "python", "compiled"):
    raise ValueError(f"ORDERTAIL_KERNELS must be auto|python|compiled, got {_mode!r}")

if _mode == "python":
    _impl = _core_py
else:
    try:
        from . import _core as _impl
    except ImportError:
        if _mode == "compiled":
            raise
        _impl = _core_py

topk_desc = _impl.topk_desc
weighted_sums = _impl.weighted_sums
weighted_topk_sums = _impl.weighted_topk_sums


def backend():
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return _impl.BACKEND
