"""Build script. Compiles the optional fast-kernel extension when Cython and a C
compiler are available; otherwise the pure numpy backend is used at runtime."""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("CONEZO_NO_EXT", "") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "conezo.kernels._ckern",
                    ["src/conezo/kernels/_ckern.pyx"],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                    optional=True,
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
