import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the Cython chain kernel if possible; fall back to pure Python.

    The package is fully functional without the compiled extension (the
    numpy fallback kernel is selected at import time), so a missing
    compiler or Cython must not abort installation.
    """

    def run(self):
        try:
            super().run()
        except Exception as exc:
            warnings.warn(f"compiled chain kernel skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled chain kernel skipped: {exc}")


def extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError as exc:
        warnings.warn(f"compiled chain kernel skipped: {exc}")
        return []
    ext = Extension(
        "sdobragg._chain",
        ["src/sdobragg/_chain.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
