"""Build script for the optional compiled machine-stepping kernels.

The package is fully functional without the extension (a pure-Python twin
of the kernels is selected at import time); building it just makes the
exhaustive run enumeration and batched sampled runs much faster.
"""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("gapinfer._ptm_kernels", ["src/gapinfer/_ptm_kernels.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
