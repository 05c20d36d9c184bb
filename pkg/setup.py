"""Build script: compiles the optional native kernel extension.

The package is fully functional without the extension (a pure-Python twin
is selected at import time); the extension only accelerates the large
statistical sweeps.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("logshave._kernels", ["src/logshave/_kernels.pyx"])],
        language_level=3,
    )
except ImportError:  # pragma: no cover - build tooling absent
    ext_modules = []

setup(ext_modules=ext_modules)
