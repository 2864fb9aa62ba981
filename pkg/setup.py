import os

import numpy as np
from setuptools import Extension, setup

ext_modules = []
if os.path.exists("src/nle/_core.pyx"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "nle._core",
                    ["src/nle/_core.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        # Pure-Python fallback in nle._core_numpy is used when the
        # compiled extension is unavailable.
        ext_modules = []

setup(ext_modules=ext_modules)
