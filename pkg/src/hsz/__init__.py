"""Error-bounded lossy compression with multi-stage decompression and
homomorphic analytics for floating-point scientific arrays."""

from ._kernels import BACKEND as kernel_backend
from .compressors import CompressedStream, CompressorKind, compress
from .errors import (
    CorruptStreamError,
    EpsTooSmallError,
    HszError,
    MissingContextError,
    UnsupportedStageError,
    ZeroValueRangeError,
)
from .quant import ErrorBound
from .stages import Stage, partial_decompress, slab_iter

__all__ = [
    "CompressedStream",
    "CompressorKind",
    "CorruptStreamError",
    "EpsTooSmallError",
    "ErrorBound",
    "HszError",
    "MissingContextError",
    "Stage",
    "UnsupportedStageError",
    "ZeroValueRangeError",
    "compress",
    "kernel_backend",
    "partial_decompress",
    "slab_iter",
]

__version__ = "0.1.0"
