"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``CAUSAL_UNFOLD_PURE=1`` to force the pure-Python kernels.
"""

import os

if os.environ.get("CAUSAL_UNFOLD_PURE"):
    from ._kernels_py import *  # noqa: F401,F403
    from ._kernels_py import BACKEND
else:
    try:
        from ._speedups import *  # noqa: F401,F403
        from ._speedups import BACKEND
    except ImportError:  # extension not built
        from ._kernels_py import *  # noqa: F401,F403
        from ._kernels_py import BACKEND

__all__ = [
    "BACKEND",
    "MaskSet",
    "down_sets",
    "downset_images",
    "images_all_in",
    "clause_i_ok",
    "union_violations",
]
