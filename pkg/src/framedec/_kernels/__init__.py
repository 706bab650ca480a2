"""Kernel selection for the line-integral weight assembly.

The hot loop of the discrete Radon transform is the assembly of the
interpolation weights of all rays.  A Cython extension implements it
when available; the numpy fallback is selected otherwise, or when the
environment variable ``FRAMEDEC_PURE_PY=1`` is set.  Both produce the
same triplets in the same order.
"""

import os

from .projector_py import line_integral_triplets as _py_triplets

if os.environ.get("FRAMEDEC_PURE_PY") == "1":
    line_integral_triplets = _py_triplets
    BACKEND = "python"
else:
    try:
        from ._projector import line_integral_triplets  # noqa: F401

        BACKEND = "compiled"
    except ImportError:
        line_integral_triplets = _py_triplets
        BACKEND = "python"

__all__ = ["line_integral_triplets", "BACKEND"]
