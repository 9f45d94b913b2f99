"""Builds the optional compiled gate kernels.

The package works without them (a numpy fallback is selected at import);
building the extension just makes the hot loops faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "triqet.qsim.backend._kernels",
                ["src/triqet/qsim/backend/_kernels.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
