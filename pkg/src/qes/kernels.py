"""Backend selection for the hot kernels.

The compiled extension is used when importable; set QES_PURE_PYTHON=1 to force
the pure-Python fallback.
"""
from __future__ import annotations

import os

if os.environ.get("QES_PURE_PYTHON", "") not in ("", "0"):
    from ._kernels_py import bisect_lowest, cyclic_count, ellipj_array, sturm_count
    BACKEND = "python"
else:
    try:
        from ._kernels import bisect_lowest, cyclic_count, ellipj_array, sturm_count
        BACKEND = "compiled"
    except ImportError:
        from ._kernels_py import bisect_lowest, cyclic_count, ellipj_array, sturm_count
        BACKEND = "python"

__all__ = ["BACKEND", "bisect_lowest", "cyclic_count", "ellipj_array", "sturm_count"]
