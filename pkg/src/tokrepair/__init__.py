"""Token-granulated bug localization and repair pipeline."""

from .tokenizers import SCAN_BACKEND

__version__ = "0.1.0"
