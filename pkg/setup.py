"""Build script for the optional compiled projector kernel.

The package is pure Python except for one hot loop: assembly of the
line-integral (Joseph interpolation) weights used by the discrete Radon
transform.  If Cython or a C compiler is unavailable the build silently
falls back to the numpy implementation selected in
``framedec._kernels``.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("FRAMEDEC_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext = Extension(
            "framedec._kernels._projector",
            sources=["src/framedec/_kernels/_projector.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            optional=True,
        )
        ext_modules = cythonize([ext], language_level="3")
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
