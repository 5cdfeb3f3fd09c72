from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "oco_lab._kernels",
                ["src/oco_lab/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # No Cython toolchain: install pure-Python only, the numpy fallback
    # kernel is selected at import time.
    pass

setup(ext_modules=ext_modules)
