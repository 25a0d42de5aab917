import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "cgqf._kernel",
        ["src/cgqf/_kernel.pyx"],
        include_dirs=[np.get_include()],
        libraries=["mpfr", "gmp"],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # without a compiler or libmpfr the package falls back to gmpy2
        optional=True,
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
