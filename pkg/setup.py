"""Build hook for the optional compiled scan kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile downgrades to a pure-Python install
instead of aborting.
"""

import logging

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

log = logging.getLogger("beamrefine.setup")


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler or toolchain missing
            log.warning("skipping compiled kernel: %s", exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            log.warning("skipping %s: %s", ext.name, exc)


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "beamrefine._scan",
        sources=["src/beamrefine/_scan.pyx"],
        # -ffp-contract=off keeps the summation bit-identical to the
        # numpy fallback (no FMA contraction of re*re + im*im).
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
    return cythonize([ext], compiler_directives={"language_level": 3})


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
