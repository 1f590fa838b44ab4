"""Build the optional compiled sweep kernels.

The package works without the extension (the pure-Python kernels are the
reference); a failed compile falls back to a source-only install.
-ffp-contract=off keeps the compiled arithmetic bit-identical to Python.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension(
            "swlag._sweeps",
            ["src/swlag/_sweeps.pyx"],
            include_dirs=[numpy.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3", "-ffp-contract=off"],
        )],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"swlag: building without compiled kernels ({exc})", file=sys.stderr)

setup(ext_modules=ext_modules)
