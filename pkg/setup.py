"""Builds the optional compiled ALS kernel.

The extension is a convenience, not a requirement: if Cython or a C
compiler is unavailable (or DOTRANK_NO_EXT=1 is set), the install
proceeds and dotrank falls back to the pure-numpy solver at import time.
"""

import os

from setuptools import Extension, setup


def _extensions():
    if os.environ.get("DOTRANK_NO_EXT") == "1":
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "dotrank.ials._solve_c",
        ["src/dotrank/ials/_solve_c.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O2"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=_extensions())
