# Builds the optional compiled kernel extension. The package works without it
# (socialgf.backend falls back to the numpy kernels), so a failed build only
# costs speed. Build in place with:
#   python3 setup.py build_ext --inplace
import sys

from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    ext_modules = cythonize(
        [
            Extension(
                "socialgf._ckernels",
                ["src/socialgf/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError as exc:
    print(f"socialgf: skipping compiled kernels ({exc}); pure-python backend only",
          file=sys.stderr)

setup(ext_modules=ext_modules)
