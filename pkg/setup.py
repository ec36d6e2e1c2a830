import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("SECUREHULL_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "securehull._kernels",
                    ["src/securehull/_kernels.pyx"],
                    libraries=["gmp"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
