# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bit-packing backend; byte-compatible with ``_fallback``."""

import numpy as np

from hsz.errors import CorruptStreamError

BACKEND = "cython"

DEF INT32_MIN = -2147483648
DEF MAG_MAX = 2147483647


def encode_stream(values, starts, ends):
    cdef long long[::1] vals = np.ascontiguousarray(values, dtype=np.int64)
    cdef long long[::1] cs = np.ascontiguousarray(starts, dtype=np.int64)
    cdef long long[::1] ce = np.ascontiguousarray(ends, dtype=np.int64)
    cdef Py_ssize_t nchunks = cs.shape[0]
    cdef Py_ssize_t i, j, s, e, count
    cdef long long v, mag, max_mag
    cdef int bw
    cdef Py_ssize_t total = 0

    # First pass: per-chunk bitwidths and total payload size.
    bws = np.empty(nchunks, dtype=np.int32)
    cdef int[::1] bwv = bws
    offsets = np.empty(nchunks, dtype=np.uint64)
    cdef unsigned long long[::1] offv = offsets
    for i in range(nchunks):
        s = cs[i]
        e = ce[i]
        max_mag = 0
        for j in range(s, e):
            v = vals[j]
            if v == INT32_MIN:
                raise ValueError(
                    "value -2**31 has no sign-magnitude representation"
                )
            mag = -v if v < 0 else v
            if mag > max_mag:
                max_mag = mag
        bw = 0
        while max_mag > 0:
            bw += 1
            max_mag >>= 1
        bwv[i] = bw
        offv[i] = total
        count = e - s
        total += 1
        if bw > 0:
            total += (count + 7) // 8 + (count * bw + 7) // 8

    buf = np.zeros(total, dtype=np.uint8)
    cdef unsigned char[::1] out = buf
    cdef Py_ssize_t pos
    cdef unsigned long long acc
    cdef int nbits
    for i in range(nchunks):
        s = cs[i]
        e = ce[i]
        count = e - s
        bw = bwv[i]
        pos = <Py_ssize_t> offv[i]
        out[pos] = <unsigned char> bw
        pos += 1
        if bw == 0:
            continue
        for j in range(s, e):
            if vals[j] < 0:
                out[pos + ((j - s) >> 3)] |= <unsigned char> (1 << ((j - s) & 7))
        pos += (count + 7) // 8
        acc = 0
        nbits = 0
        for j in range(s, e):
            v = vals[j]
            mag = -v if v < 0 else v
            acc |= (<unsigned long long> mag) << nbits
            nbits += bw
            while nbits >= 8:
                out[pos] = <unsigned char> (acc & 0xFF)
                pos += 1
                acc >>= 8
                nbits -= 8
        if nbits > 0:
            out[pos] = <unsigned char> (acc & 0xFF)
            pos += 1
    return buf.tobytes(), offsets


def decode_stream(payload, starts, ends, offsets):
    cdef const unsigned char[::1] buf = payload
    cdef long long[::1] cs = np.ascontiguousarray(starts, dtype=np.int64)
    cdef long long[::1] ce = np.ascontiguousarray(ends, dtype=np.int64)
    cdef unsigned long long[::1] offv = np.ascontiguousarray(
        offsets, dtype=np.uint64
    )
    cdef Py_ssize_t nchunks = cs.shape[0]
    cdef Py_ssize_t n = ce[nchunks - 1] if nchunks > 0 else 0
    values = np.zeros(n, dtype=np.int32)
    cdef int[::1] vals = values
    cdef Py_ssize_t i, j, s, e, count, pos, sign_pos, end
    cdef int bw, nbits, neg
    cdef unsigned long long acc, mask, mag
    cdef Py_ssize_t size = buf.shape[0]

    for i in range(nchunks):
        s = cs[i]
        e = ce[i]
        count = e - s
        pos = <Py_ssize_t> offv[i]
        if pos >= size:
            raise CorruptStreamError("chunk offset past end of payload")
        bw = buf[pos]
        if bw > 32:
            raise CorruptStreamError(f"chunk bitwidth {bw} exceeds 32")
        pos += 1
        if bw == 0:
            continue
        sign_pos = pos
        pos += (count + 7) // 8
        end = pos + (count * bw + 7) // 8
        if end > size:
            raise CorruptStreamError("truncated chunk payload")
        mask = (<unsigned long long> 1 << bw) - 1
        acc = 0
        nbits = 0
        for j in range(count):
            while nbits < bw:
                acc |= (<unsigned long long> buf[pos]) << nbits
                pos += 1
                nbits += 8
            mag = acc & mask
            acc >>= bw
            nbits -= bw
            if mag > MAG_MAX:
                raise CorruptStreamError("chunk magnitude exceeds int32 range")
            neg = (buf[sign_pos + (j >> 3)] >> (j & 7)) & 1
            if neg:
                if mag == 0:
                    raise CorruptStreamError("negative zero in chunk")
                vals[s + j] = <int> (-(<long long> mag))
            else:
                vals[s + j] = <int> mag
    return values
