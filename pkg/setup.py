"""Build script: compiles the optional separation-oracle stepping kernel.

The package works without the extension (a pure-Python implementation of the
same loop is selected at import time); the extension just makes the hot
per-oracle-call loop roughly an order of magnitude faster.  Build problems
therefore degrade to a warning, not a failure.
"""

import warnings

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/soco/_ipso_core.pyx"],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    warnings.warn(f"building without compiled kernels: {exc}")

setup(ext_modules=ext_modules)
