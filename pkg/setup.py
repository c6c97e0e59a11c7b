"""Build script: compiles the optional max-clique extension.

The extension is a speedup only; if Cython or a C compiler is missing the
package installs without it and the pure-Python kernel is used instead.
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - depends on toolchain
            warnings.warn(f"skipping compiled kernels ({exc}); pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover
            warnings.warn(f"skipping {ext.name} ({exc}); pure-Python fallback will be used")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover
        return []
    from setuptools import Extension

    ext = Extension(
        "homspace._kernels._cliquer",
        ["src/homspace/_kernels/_cliquer.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
