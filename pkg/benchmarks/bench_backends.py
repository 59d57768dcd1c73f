"""Throughput comparison of the compiled and numpy bit-packing backends.

Run:  python3 benchmarks/bench_backends.py [--elements N] [--repeats R]

Times encode_stream/decode_stream on identical random residual streams and
prints MB/s for each available backend, plus a byte-equality cross-check.
"""

import argparse
import time

import numpy as np

from hsz import codec
from hsz._kernels import _fallback

try:
    from hsz._kernels import _bitpack
except ImportError:
    _bitpack = None


def make_stream(n, seed=1234):
    rng = np.random.default_rng(seed)
    # Mix of near-zero residuals and occasional large values, like real
    # decorrelated data.
    values = rng.integers(-6, 7, size=n).astype(np.int32)
    spikes = rng.random(n) < 0.01
    values[spikes] = rng.integers(-(2**20), 2**20, size=int(spikes.sum()))
    spans = codec.spans_from_segments([(0, n)])
    return values, spans


def bench(impl, values, spans, repeats):
    starts, ends = spans[:, 0], spans[:, 1]
    payload, offsets = impl.encode_stream(values, starts, ends)
    enc_t = min(
        timed(lambda: impl.encode_stream(values, starts, ends))
        for _ in range(repeats)
    )
    dec_t = min(
        timed(lambda: impl.decode_stream(payload, starts, ends, offsets))
        for _ in range(repeats)
    )
    mb = values.nbytes / 1e6
    return payload, mb / enc_t, mb / dec_t


def timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--elements", type=int, default=4_000_000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    values, spans = make_stream(args.elements)
    pay_py, enc_py, dec_py = bench(_fallback, values, spans, args.repeats)
    print(f"python backend:  encode {enc_py:8.1f} MB/s   decode {dec_py:8.1f} MB/s")
    if _bitpack is None:
        print("compiled backend not built; install with a C compiler to compare")
        return
    pay_c, enc_c, dec_c = bench(_bitpack, values, spans, args.repeats)
    print(f"cython backend:  encode {enc_c:8.1f} MB/s   decode {dec_c:8.1f} MB/s")
    print(f"speedup: encode {enc_c / enc_py:.1f}x, decode {dec_c / dec_py:.1f}x")
    print(f"payloads identical: {pay_c == pay_py}")


if __name__ == "__main__":
    main()
