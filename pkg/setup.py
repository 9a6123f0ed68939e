"""Build hook for the optional compiled token scanner.

The package works without the extension; tokenizers fall back to the
pure-Python scanner at import time.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("TOKREPAIR_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("tokrepair._scan_c", ["src/tokrepair/_scan_c.pyx"])],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
