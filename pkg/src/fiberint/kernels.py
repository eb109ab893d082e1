"""Select the compiled term kernels when available, else the Python ones.

Set ``FIBERINT_PURE_PYTHON=1`` to force the fallback.
"""
import os

BACKEND = "python"

if not os.environ.get("FIBERINT_PURE_PYTHON"):
    try:
        from ._kernels import d_terms, merge_differentials, wedge_terms
        BACKEND = "cython"
    except ImportError:
        pass

if BACKEND == "python":
    from ._kernels_py import d_terms, merge_differentials, wedge_terms

__all__ = ["BACKEND", "d_terms", "merge_differentials", "wedge_terms"]
