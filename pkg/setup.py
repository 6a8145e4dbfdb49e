"""Build script: compiles the scanning kernels when a toolchain is present.

The extension is optional.  If Cython or a C compiler is missing the install
still succeeds and the package falls back to the vectorised numpy scanners
(`twinlab._scan_py`), selected at import time by `twinlab.scan`.
"""
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler, broken toolchain, ...
            warnings.warn(f"building the compiled scan kernels failed ({exc}); "
                          "falling back to the pure numpy implementation")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"building {ext.name} failed ({exc}); "
                          "falling back to the pure numpy implementation")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython not available; skipping compiled scan kernels")
        return []
    exts = [
        Extension(
            "twinlab._scan_c",
            ["src/twinlab/_scan_c.pyx"],
            extra_compile_args=["-O3"],
        )
    ]
    return cythonize(exts, compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
