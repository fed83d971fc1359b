import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

# Compiled fast path for the two hot loops (eigenvalue ascent, distance
# descent).  The package falls back to the numpy implementations in
# urigid._kernels.pure when the extension is missing.
extensions = [
    Extension(
        "urigid._kernels._core",
        ["src/urigid/_kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
)
