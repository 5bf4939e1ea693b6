"""Pick the compiled kernels when available, else the pure-Python ones.

Set ``ELLIPTIC_CONDNUM_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
kernels = _kernels_py

if not os.environ.get("ELLIPTIC_CONDNUM_PURE_PYTHON"):
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        kernels = _ckernels
        BACKEND = "cython"

__all__ = ["BACKEND", "kernels"]
