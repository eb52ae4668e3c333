"""Build script: compiles the kernel extension when a toolchain is present.

The package is fully functional without it (a numpy fallback is selected at
import); set PARETOCOUNT_SKIP_EXT=1 to skip compilation explicitly.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("PARETOCOUNT_SKIP_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "paretocount._kernels",
                    ["src/paretocount/_kernels.pyx"],
                )
            ],
            quiet=True,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
