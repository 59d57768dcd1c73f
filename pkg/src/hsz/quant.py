"""Linear-scaling quantization under an absolute error bound.

A float d maps to the integer q = floor(d / (2*eps) + 0.5); dequantization
returns 2*q*eps, which keeps every point within eps of the original.  The
rounding rule is half-toward-positive-infinity (7.5 -> 8, -11.5 -> -11), not
banker's rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EpsTooSmallError, ZeroValueRangeError
from .grid import GridShape

# Leave one index of headroom below the int32 limit.
QMAX = 2**31 - 2


@dataclass(frozen=True)
class ErrorBound:
    """User-requested error bound, absolute or value-range relative."""

    mode: str  # "abs" | "rel"
    requested: float

    def __post_init__(self):
        if self.mode not in ("abs", "rel"):
            raise ValueError(f"error bound mode must be abs or rel, got {self.mode!r}")
        if not self.requested > 0:
            raise ValueError(f"error bound must be positive, got {self.requested}")

    @classmethod
    def parse(cls, text: str) -> "ErrorBound":
        """Parse 'abs:<float>' or 'rel:<float>'."""
        mode, _, value = text.partition(":")
        if not value:
            raise ValueError(f"error bound must look like abs:0.1, got {text!r}")
        return cls(mode, float(value))


@dataclass(frozen=True)
class QuantizedField:
    """Grid of 32-bit quantization indices plus the resolved eps."""

    values: np.ndarray  # int32, grid-shaped
    eps: float

    @property
    def shape(self) -> GridShape:
        return GridShape(self.values.shape)


def resolve_eps(field: np.ndarray, bound: ErrorBound) -> float:
    """Resolve a bound to an absolute eps in data units."""
    if bound.mode == "abs":
        return float(bound.requested)
    lo = float(np.min(field))
    hi = float(np.max(field))
    if hi == lo:
        raise ZeroValueRangeError(
            "constant field has zero value range; use an absolute error bound"
        )
    return float(bound.requested) * (hi - lo)


def quantize(values, eps: float) -> np.ndarray:
    """Quantize floats to int32 indices; scalar inputs give a 0-d array."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    # Multiply by the precomputed reciprocal (the throughput-oriented form);
    # with division, 1.5 at eps=0.1 lands one ulp under 7.5 and rounds wrong.
    recip = 1.0 / (2.0 * eps)
    scaled = np.asarray(values, dtype=np.float64) * recip + 0.5
    q = np.floor(scaled)
    if np.any(np.abs(q) > QMAX):
        raise EpsTooSmallError(
            f"quantization index exceeds {QMAX}; increase the error bound"
        )
    return q.astype(np.int32)


def dequantize(q, eps: float) -> np.ndarray:
    """Recover floats as 2*q*eps."""
    return np.asarray(q, dtype=np.float64) * (2.0 * eps)


def quantize_field(field: np.ndarray, eps: float) -> QuantizedField:
    if not np.all(np.isfinite(field)):
        raise ValueError("field contains NaN or Inf; refusing to quantize")
    return QuantizedField(quantize(field, eps), float(eps))
