"""Decode-work instrumentation used to compare decompression stages."""

from dataclasses import dataclass


@dataclass
class DecodeCounters:
    chunks_decoded: int = 0
    bytes_read: int = 0
    recorrelated_elements: int = 0
    dequantized_elements: int = 0

    def reset(self):
        self.chunks_decoded = 0
        self.bytes_read = 0
        self.recorrelated_elements = 0
        self.dequantized_elements = 0

    @property
    def total_work(self) -> int:
        return (
            self.chunks_decoded
            + self.recorrelated_elements
            + self.dequantized_elements
        )


decode_counters = DecodeCounters()
