"""Builds the optional compiled kernel extension.

The package works without it (a pure-Python fallback is selected at
import); a failed extension build therefore only costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "ecbw._kernels._ckernels",
                ["src/ecbw/_kernels/_ckernels.pyx"],
                extra_compile_args=["-O2"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
