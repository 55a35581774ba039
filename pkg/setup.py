import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "plancherel_airy.kernels._rsk",
                ["src/plancherel_airy/kernels/_rsk.pyx"],
                language="c++",
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure-Python fallback is selected at import time; the wheel still works.
    extensions = []

setup(ext_modules=extensions)
