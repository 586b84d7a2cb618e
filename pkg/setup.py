"""Builds the optional compiled scan kernel; the package works without it."""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    ext_modules = cythonize(["src/sextics/_scan.pyx"], language_level=3, quiet=True)
except ImportError:
    pass

setup(ext_modules=ext_modules)
