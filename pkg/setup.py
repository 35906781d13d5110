from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "lcsync._kernels._compiled",
                ["src/lcsync/_kernels/_compiled.pyx"],
                # -fcx-limited-range keeps gcc from emitting __muldc3 calls
                # for every complex multiply (no inf recovery needed here).
                extra_compile_args=["-O3", "-fcx-limited-range", "-funroll-loops"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure-Python install still works; the kernels fall back to numpy/scipy.
    extensions = []

setup(ext_modules=extensions)
