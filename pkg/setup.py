"""Builds the optional Cython term kernels; without Cython the package is pure Python."""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
except ImportError:
    pass
else:
    ext_modules = cythonize(["src/fiberint/_kernels.pyx"], language_level=3, quiet=True)

setup(ext_modules=ext_modules)
