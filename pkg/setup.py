"""Build hooks for the optional compiled simplex kernel.

The package is pure Python plus one Cython extension.  If Cython or a C
compiler is unavailable the build silently skips the extension and the
package falls back to the pure kernel at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("bclab._simplex_cy", ["src/bclab/_simplex_cy.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
