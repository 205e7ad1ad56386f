"""Build hook for the optional Cython kernels.

The package works without them; ``tstruct._backend`` falls back to the
pure-Python kernels when the extension is missing.
"""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("TSTRUCT_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "tstruct._kernels",
                    ["src/tstruct/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
