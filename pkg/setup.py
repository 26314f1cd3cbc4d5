"""Build hook for the optional compiled happens-before kernel.

The kernel is skipped quietly when Cython or a C compiler is missing; the
package then runs on its pure-Python fallback.
"""
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/apecheck/baselines/_hbkernel.pyx"],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
        quiet=True,
    )
except Exception:  # pragma: no cover - build environment dependent
    ext_modules = []

setup(ext_modules=ext_modules)
