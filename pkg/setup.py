"""Build script: compiles the optional simplex pivot kernel.

The package works without the extension (a numpy fallback is selected at
import time), so build failures here only cost speed, not functionality.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Skip the extension instead of failing the install on broken toolchains."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # noqa: BLE001
            warnings.warn(f"compiled kernel skipped ({exc}); using pure-python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # noqa: BLE001
            warnings.warn(f"compiled kernel skipped ({exc}); using pure-python fallback")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "mmconverse._simplex_cy",
        sources=["src/mmconverse/_simplex_cy.pyx"],
        # -ffp-contract=off keeps the pivot arithmetic bit-identical to the
        # numpy fallback (no fused multiply-add).
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
