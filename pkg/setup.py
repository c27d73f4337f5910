"""Build script: compiles the Cython sweep kernels when a toolchain is available.

The package is fully functional without the extension; `hexsse._backend`
falls back to the pure-Python kernels at import time.  `-ffp-contract=off`
keeps float arithmetic bit-identical between the two backends.
"""
import os
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    if not os.path.exists("src/hexsse/_kernels.pyx"):
        raise ImportError("kernel source not present")
    ext_modules = cythonize(
        [
            Extension(
                "hexsse._kernels",
                ["src/hexsse/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError as exc:  # pragma: no cover
    sys.stderr.write(f"hexsse: building without compiled kernels ({exc})\n")

setup(ext_modules=ext_modules)
