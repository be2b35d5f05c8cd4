"""Word frames, the compressed container, and compress/decompress.

Frame layout (fields in stream order, MSB first)::

    flag  2   00 space run, 01 newline run, 10 special word, 11 alphabetic word
    nc    4   run length or word length, 1..15
    cs    nc  case mask, 1 = uppercase            (flag 11 only)
    ic    5   initial letter, 1 = a .. 26 = z     (flag 11 with nc >= 3)
    pos   8   position in the dictionary bucket   (flags 10 and 11)

Container layout, little-endian integers::

    b"IDXD" | version u8 | dict_id u64 | required_seq u64 | frame_count u32 | payload
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np

from . import kernels
from .bitstream import BitReader, BitWriter
from .dictionary import MAIN_MIN_NC, Dictionary, normalize
from .errors import (
    BadContainer,
    BucketFull,
    DictionaryFull,
    DictionaryMismatch,
    DictionaryTooOld,
    InvalidFrame,
    LengthMismatch,
    PositionUnknown,
    TrailingGarbage,
    TruncatedStream,
    ZeroOriginal,
)
from .tokenizer import Kind, Token, tokenize, validate

FLAG_SPACE, FLAG_NEWLINE, FLAG_SPECIAL, FLAG_ALPHA = 0, 1, 2, 3

MAGIC = b"IDXD"
VERSION = 1
_HEADER = struct.Struct("<4sBQQI")
HEADER_SIZE = _HEADER.size  # 25


@dataclass(frozen=True)
class Frame:
    f: int
    nc: int
    cs: Optional[int] = None
    ic: Optional[int] = None
    pos: Optional[int] = None

    @property
    def width(self) -> int:
        return frame_width(self.f, self.nc)

    def check(self) -> "Frame":
        """Raise InvalidFrame unless field presence and ranges match the flag."""
        if self.f not in (0, 1, 2, 3):
            raise InvalidFrame(f"flag out of range: {self}")
        if not 1 <= self.nc <= 15:
            raise InvalidFrame(f"nc must be 1..15: {self}")
        want_cs = self.f == FLAG_ALPHA
        want_ic = want_cs and self.nc >= MAIN_MIN_NC
        want_pos = self.f >= FLAG_SPECIAL
        for name, wanted in (("cs", want_cs), ("ic", want_ic), ("pos", want_pos)):
            if (getattr(self, name) is not None) != wanted:
                raise InvalidFrame(f"field {name} {'missing' if wanted else 'not allowed'}: {self}")
        if want_cs and not 0 <= self.cs < 1 << self.nc:
            raise InvalidFrame(f"case mask wider than nc: {self}")
        if want_ic and not 1 <= self.ic <= 26:
            raise InvalidFrame(f"ic must be 1..26: {self}")
        if want_pos and not 0 <= self.pos <= 255:
            raise InvalidFrame(f"pos must be 0..255: {self}")
        return self


def frame_width(f: int, nc: int) -> int:
    if f in (FLAG_SPACE, FLAG_NEWLINE):
        return 6
    if f == FLAG_SPECIAL:
        return 14
    return 19 + nc if nc >= MAIN_MIN_NC else 14 + nc


# -- case handling ------------------------------------------------------------

def case_mask(word: bytes | str) -> int:
    """One bit per letter, first letter in the most significant bit, 1 = uppercase.

    >>> format(case_mask("ThiS"), "04b")
    '1001'
    """
    if isinstance(word, str):
        word = word.encode("latin-1")
    mask = 0
    for b in word:
        mask = (mask << 1) | (0x41 <= b <= 0x5A)
    return mask


def apply_case(word: str, cs: int | str, nc: int | None = None) -> str:
    """Uppercase character i of ``word`` where bit i of ``cs`` (MSB first) is set.

    ``cs`` may be an int or a bit string such as ``"1001"``.
    """
    if isinstance(cs, str):
        nc, cs = len(cs), int(cs, 2)
    if nc is None:
        nc = len(word)
    if len(word) != nc or cs >> nc:
        raise LengthMismatch(f"case mask does not match {len(word)}-letter word {word!r}")
    if cs == 0:
        return word
    return "".join(
        ch.upper() if (cs >> (nc - 1 - i)) & 1 else ch for i, ch in enumerate(word)
    )


# -- single-frame serialization -------------------------------------------------

def frame_to_bits(fr: Frame, w: BitWriter) -> BitWriter:
    fr.check()
    w.write_bits(fr.f, 2).write_bits(fr.nc, 4)
    if fr.cs is not None:
        w.write_bits(fr.cs, fr.nc)
    if fr.ic is not None:
        w.write_bits(fr.ic, 5)
    if fr.pos is not None:
        w.write_bits(fr.pos, 8)
    return w


def bits_to_frame(r: BitReader) -> Frame:
    f = r.read_bits(2)
    nc = r.read_bits(4)
    if nc == 0:
        raise InvalidFrame(f"zero count at bit {r.bit_cursor - 4}")
    if f in (FLAG_SPACE, FLAG_NEWLINE):
        return Frame(f, nc)
    if f == FLAG_SPECIAL:
        return Frame(f, nc, pos=r.read_bits(8))
    cs = r.read_bits(nc)
    ic = None
    if nc >= MAIN_MIN_NC:
        ic = r.read_bits(5)
        if not 1 <= ic <= 26:
            raise InvalidFrame(f"initial-character index {ic} outside 1..26")
    return Frame(f, nc, cs=cs, ic=ic, pos=r.read_bits(8))


# -- encoding -----------------------------------------------------------------

def _encode_fields(t: Token, d: Dictionary) -> Tuple[int, int, int, int, int]:
    """``(f, nc, cs, ic, pos)`` for a well-formed token, 0 for absent fields."""
    kind = t.kind
    if kind is Kind.SPACE_RUN:
        return FLAG_SPACE, t.value, 0, 0, 0
    if kind is Kind.NEWLINE_RUN:
        return FLAG_NEWLINE, t.value, 0, 0, 0
    word = t.value
    nc = len(word)
    try:
        if kind is Kind.SPECIAL_WORD:
            return FLAG_SPECIAL, nc, 0, 0, d.find_or_insert_special(word, nc)
        lower = normalize(word)
        if nc < MAIN_MIN_NC:
            return FLAG_ALPHA, nc, case_mask(word), 0, d.find_or_insert_short(lower)
        ic, pos = d.find_or_insert_main(lower, nc)
        return FLAG_ALPHA, nc, case_mask(word), ic, pos
    except BucketFull as exc:
        raise DictionaryFull(str(exc)) from exc


def _frame_from_fields(f: int, nc: int, cs: int, ic: int, pos: int) -> Frame:
    if f < FLAG_SPECIAL:
        return Frame(f, nc)
    if f == FLAG_SPECIAL:
        return Frame(f, nc, pos=pos)
    return Frame(f, nc, cs=cs, ic=ic if nc >= MAIN_MIN_NC else None, pos=pos)


def encode_token(t: Token, d: Dictionary) -> Frame:
    """Map one token to its frame, inserting its word into ``d`` on a miss."""
    validate(t)
    return _frame_from_fields(*_encode_fields(t, d))


def _decode_fields(f: int, nc: int, cs: int, ic: int, pos: int, d: Dictionary) -> bytes:
    if f == FLAG_SPACE:
        return b" " * nc
    if f == FLAG_NEWLINE:
        return b"\n" * nc
    if f == FLAG_SPECIAL:
        return d.lookup_special(nc, pos)
    if nc < MAIN_MIN_NC:
        word = d.lookup_short(pos)
        if len(word) != nc:
            raise PositionUnknown(f"short entry {pos} has length {len(word)}, frame says {nc}")
    else:
        word = d.lookup_main(ic, nc, pos)
    return apply_case(word, cs, nc).encode("ascii")


def decode_frame(fr: Frame, d: Dictionary) -> bytes:
    fr.check()
    return _decode_fields(fr.f, fr.nc, fr.cs or 0, fr.ic or 0, fr.pos or 0, d)


# -- container ------------------------------------------------------------------

@dataclass(frozen=True)
class CompressedContainer:
    dict_id: int
    required_seq: int
    frame_count: int
    payload: bytes
    version: int = VERSION

    def to_bytes(self) -> bytes:
        return _HEADER.pack(MAGIC, self.version, self.dict_id, self.required_seq, self.frame_count) + self.payload

    @classmethod
    def from_bytes(cls, data: bytes) -> "CompressedContainer":
        data = bytes(data)
        if len(data) < HEADER_SIZE:
            raise BadContainer(f"container shorter than its {HEADER_SIZE}-byte header")
        magic, version, dict_id, required_seq, count = _HEADER.unpack_from(data)
        if magic != MAGIC:
            raise BadContainer(f"bad magic {magic!r}")
        if version != VERSION:
            raise BadContainer(f"unsupported container version {version}")
        return cls(dict_id, required_seq, count, data[HEADER_SIZE:], version)

    def __len__(self) -> int:
        return HEADER_SIZE + len(self.payload)


def encode_tokens(tokens: Iterable[Token], d: Dictionary) -> List[Frame]:
    return [encode_token(t, d) for t in tokens]


def _frame_arrays(frames: List[Frame]) -> Tuple[np.ndarray, ...]:
    n = len(frames)
    arr = np.zeros((5, n), dtype=np.uint32)
    for i, fr in enumerate(frames):
        arr[0, i] = fr.f
        arr[1, i] = fr.nc
        if fr.cs is not None:
            arr[2, i] = fr.cs
        if fr.ic is not None:
            arr[3, i] = fr.ic
        if fr.pos is not None:
            arr[4, i] = fr.pos
    return tuple(arr)


def pack(frames: List[Frame], backend: str | None = None) -> Tuple[bytes, int]:
    """Serialize frames with the bulk kernel; returns ``(payload, bit_length)``."""
    return kernels.pack_frames(*_frame_arrays(frames), backend=backend)


def compress(data: bytes, d: Dictionary, backend: str | None = None) -> CompressedContainer:
    """Compress ``data`` against ``d``; unseen words are appended to ``d``."""
    rows = [_encode_fields(t, d) for t in tokenize(data)]
    fields = np.array(rows, dtype=np.uint32).reshape(-1, 5).T
    payload, _ = kernels.pack_frames(*fields, backend=backend)
    return CompressedContainer(d.id, d.seq, len(rows), payload)


def check_dictionary(c: CompressedContainer, d: Dictionary) -> None:
    if c.dict_id != d.id:
        raise DictionaryMismatch(f"container needs dictionary {c.dict_id:016x}, got {d.id:016x}")
    if d.seq < c.required_seq:
        raise DictionaryTooOld(f"container needs seq >= {c.required_seq}, dictionary is at {d.seq}")


def _unpack_fields(c: CompressedContainer, backend: str | None) -> list:
    fields, status, read, used = kernels.unpack_frames(c.payload, c.frame_count, backend)
    if status == kernels.TRUNCATED:
        raise TruncatedStream(f"payload ends inside frame {read} of {c.frame_count}")
    if status == kernels.ZERO_COUNT:
        raise InvalidFrame(f"frame {read} has nc = 0")
    if status == kernels.BAD_INITIAL:
        raise InvalidFrame(f"frame {read} has an initial-character index outside 1..26")
    expected_len = (used + 7) // 8
    if len(c.payload) != expected_len:
        raise TrailingGarbage(f"{len(c.payload) - expected_len} bytes after the last frame")
    if used % 8 and c.payload[-1] & ((1 << (8 - used % 8)) - 1):
        raise TrailingGarbage("nonzero padding bits")
    return fields.T.tolist()


def unpack(c: CompressedContainer, backend: str | None = None) -> List[Frame]:
    """Parse exactly ``frame_count`` frames and verify the padding."""
    return [_frame_from_fields(*row) for row in _unpack_fields(c, backend)]


def decompress(c: CompressedContainer | bytes, d: Dictionary, backend: str | None = None) -> bytes:
    if not isinstance(c, CompressedContainer):
        c = CompressedContainer.from_bytes(c)
    check_dictionary(c, d)
    return b"".join([_decode_fields(*row, d) for row in _unpack_fields(c, backend)])


# -- metrics --------------------------------------------------------------------

@dataclass(frozen=True)
class Metrics:
    original_size: int
    compressed_size: int
    compressed_percent: float
    compression_ratio: float


def metrics(original_size: int, compressed_size: int) -> Metrics:
    """Compression ratio (compressed / original) and space saving in percent,
    rounded to 4 and 2 decimals."""
    if original_size <= 0:
        raise ZeroOriginal("original size must be positive")
    ratio = compressed_size / original_size
    return Metrics(original_size, compressed_size, round((1 - ratio) * 100, 2), round(ratio, 4))
