"""Build the optional compiled edit-distance kernels.

The package works without the extension (a pure-Python mirror is selected
at import time), so the extension is marked optional: a missing compiler
or Cython degrades the install instead of failing it. Set
VARIAFORGE_PURE_PYTHON=1 to skip the extension on purpose.
"""

import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None and not os.environ.get("VARIAFORGE_PURE_PYTHON"):
    ext_modules = cythonize(
        [
            Extension(
                "variaforge._kernels",
                ["src/variaforge/_kernels.pyx"],
                extra_compile_args=["-O2"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
