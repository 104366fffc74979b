"""Build the optional Cython decoder kernel.

The package works without it: ``pppm.simulator.kernels`` falls back to a
vectorised numpy implementation when the extension is missing.
"""
import os
import warnings

from setuptools import setup

ext_modules = []
if os.environ.get("PPPM_NO_EXTENSION", "") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "pppm.simulator._kernel",
                    ["src/pppm/simulator/_kernel.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        warnings.warn("Cython not available; building pure-Python pppm only")

setup(ext_modules=ext_modules)
