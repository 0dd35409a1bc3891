import os

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - fallback kernels still work
    cythonize = None

ext_modules = []
if cythonize is not None and os.environ.get("QEF_NO_EXT") != "1":
    ext_modules = cythonize(
        [
            Extension(
                "qef._kernels",
                ["src/qef/_kernels.pyx"],
                extra_compile_args=["-O3"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
