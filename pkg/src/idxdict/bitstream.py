"""MSB-first bit packing for fixed-width unsigned fields."""
from __future__ import annotations

from .errors import TruncatedStream, ValueOverflow

MAX_WIDTH = 32


def _check_width(width: int) -> None:
    if not 1 <= width <= MAX_WIDTH:
        raise ValueError(f"width must be in [1, {MAX_WIDTH}], got {width}")


class BitWriter:
    """Accumulates unsigned fields and emits zero-padded bytes.

    >>> w = BitWriter()
    >>> w.write_bits(0b11, 2).write_bits(0b0011, 4).finish()
    b'\\xcc'
    """

    def __init__(self) -> None:
        self.buffer = bytearray()
        self.bit_cursor = 0
        self._acc = 0
        self._nacc = 0

    def write_bits(self, value: int, width: int) -> "BitWriter":
        _check_width(width)
        if value < 0 or value >> width:
            raise ValueOverflow(f"value {value} does not fit in {width} bits")
        self._acc = (self._acc << width) | value
        self._nacc += width
        self.bit_cursor += width
        while self._nacc >= 8:
            self._nacc -= 8
            self.buffer.append((self._acc >> self._nacc) & 0xFF)
        self._acc &= (1 << self._nacc) - 1
        return self

    def finish(self) -> bytes:
        """Return the packed bytes, zero-padding the final partial byte."""
        out = bytes(self.buffer)
        if self._nacc:
            out += bytes([(self._acc << (8 - self._nacc)) & 0xFF])
        return out


class BitReader:
    def __init__(self, source: bytes) -> None:
        self.source = bytes(source)
        self.bit_cursor = 0

    @property
    def remaining(self) -> int:
        return len(self.source) * 8 - self.bit_cursor

    def read_bits(self, width: int) -> int:
        _check_width(width)
        if width > self.remaining:
            raise TruncatedStream(
                f"need {width} bits at offset {self.bit_cursor}, only {self.remaining} left"
            )
        start = self.bit_cursor
        first, last = start >> 3, (start + width - 1) >> 3
        chunk = int.from_bytes(self.source[first:last + 1], "big")
        tail = (last + 1) * 8 - (start + width)
        self.bit_cursor += width
        return (chunk >> tail) & ((1 << width) - 1)
