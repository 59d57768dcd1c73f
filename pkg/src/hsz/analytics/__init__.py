"""Homomorphic analytics on intermediate decompression stages."""

from . import fields, stats  # noqa: F401
