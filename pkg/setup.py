"""Build glue for the optional compiled bit-packing kernel.

The extension is best effort: if Cython or a C compiler is unavailable the
package installs anyway and falls back to the numpy backend at import time.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/hsz/_kernels/_bitpack.pyx"],
        language_level=3,
    )
except Exception as exc:  # noqa: BLE001
    print(f"skipping compiled kernel ({exc}); numpy fallback will be used")

setup(ext_modules=ext_modules)
