from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
    import numpy as np

    extensions = cythonize(
        [
            Extension(
                "spidermax.kernels._core",
                sources=["src/spidermax/kernels/_core.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython: install pure-Python only, kernels fall back at import time.
    extensions = []

setup(ext_modules=extensions)
