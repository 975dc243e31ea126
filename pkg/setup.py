"""Build the optional Cython tally kernel.

The package works without the extension (a pure-Python kernel is selected
at import time); building it just makes large tabulations faster.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    import numpy as np

    ext_modules = cythonize(
        [
            Extension(
                "rcvoutcomes._tally_cy",
                sources=["src/rcvoutcomes/_tally_cy.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "language_level": "3",
        },
    )

setup(ext_modules=ext_modules)
