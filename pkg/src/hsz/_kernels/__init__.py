"""Bit-packing kernels: compiled extension when available, numpy fallback.

Set HSZ_PURE_PYTHON=1 to force the fallback (used by the benchmark and to
cross-check the two backends).
"""

import os

from . import _fallback

if os.environ.get("HSZ_PURE_PYTHON"):
    impl = _fallback
else:
    try:
        from . import _bitpack as impl  # type: ignore[no-redef]
    except ImportError:
        impl = _fallback

BACKEND = impl.BACKEND

encode_stream = impl.encode_stream
decode_stream = impl.decode_stream
