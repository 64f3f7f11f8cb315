"""Builds the compiled fixed-point kernel; the package still works without it."""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        Extension(
            "inclogic.fixpoint._ckernel",
            ["src/inclogic/fixpoint/_ckernel.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        ),
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
