"""Exception types shared across the package."""


class HszError(Exception):
    """Base class for all hsz-specific failures."""


class CorruptStreamError(HszError):
    """Compressed payload is truncated, malformed, or fails validation."""


class UnsupportedStageError(HszError):
    """Requested decompression stage is not available for this compressor."""


class ZeroValueRangeError(HszError, ValueError):
    """Relative error bound on a constant field; no value range to scale."""


class EpsTooSmallError(HszError, ValueError):
    """Quantization indices or residuals overflow 32-bit signed range."""


class MissingContextError(HszError):
    """Partial prefix-predicted stream cannot be recorrelated without its
    predecessor context."""
