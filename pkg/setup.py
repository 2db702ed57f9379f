"""Build script: compiles the optional C reachability/CI kernels.

The package works without the extension (pure NumPy fallbacks are selected at
import time), so any compilation failure downgrades to a plain install rather
than aborting.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "lfci._fastkern",
                ["src/lfci/_fastkern.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    sys.stderr.write(f"lfci: skipping compiled kernels ({exc}); using pure-Python fallback\n")

setup(ext_modules=ext_modules)
