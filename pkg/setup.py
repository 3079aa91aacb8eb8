"""Build script: compiles the optional Cython trace kernels.

The package is fully functional without the extension; the kernel
dispatcher falls back to the numpy implementation at import time when
``toeplitz_fluct.kernels._core`` is missing.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "toeplitz_fluct.kernels._core",
                ["src/toeplitz_fluct/kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
