"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise, or when the
``BCNOMA_PURE_PYTHON`` environment variable is set to a non-empty value
other than ``0``, the numpy fallback is used. ``BACKEND`` names the choice.
"""

import os

from . import _fallback

if os.environ.get("BCNOMA_PURE_PYTHON", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
        BACKEND = "python"

min_power_batch = _impl.min_power_batch
oracle_nc = _impl.oracle_nc
oracle_cr = _impl.oracle_cr
oracle_bc = _impl.oracle_bc

__all__ = ["BACKEND", "min_power_batch", "oracle_nc", "oracle_cr", "oracle_bc"]
