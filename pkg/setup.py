import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    # The package falls back to the pure-numpy kernels at import time, so a
    # build without Cython still yields a working install.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "dnlrl.kernels._fastcore",
                ["src/dnlrl/kernels/_fastcore.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
