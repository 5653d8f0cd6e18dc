"""Build script: compiles the Cython kernel extension when a toolchain is
available.  The package works without it (pure-numpy fallback is selected
at import time), so extension build failures are non-fatal.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "tflat._kernels",
                ["src/tflat/_kernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover
    print(f"tflat: skipping Cython extension build ({exc}); "
          "pure-python kernels will be used")

setup(ext_modules=ext_modules)
