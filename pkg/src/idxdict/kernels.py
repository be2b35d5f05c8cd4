"""Bulk frame packing/unpacking kernels.

Frames travel as five parallel ``uint32`` arrays ``(flag, nc, cs, ic, pos)``;
fields a frame class does not carry are ignored on packing and returned as 0
when unpacking. Field order and widths:

    flag 2 | nc 4 | cs nc bits (flag 3) | ic 5 (flag 3, nc >= 3) | pos 8 (flag 2, 3)

Two implementations share this contract: numba ``@njit`` kernels and a
numpy fallback. ``IDXDICT_DISABLE_NUMBA=1`` selects the fallback.
"""
from __future__ import annotations

import numpy as np

from ._numba_settings import HAVE_NUMBA, numba_default

# status codes returned by unpack_frames
OK = 0
TRUNCATED = 1
ZERO_COUNT = 2
BAD_INITIAL = 3

FLAG_SPECIAL = 2
FLAG_ALPHA = 3
MAIN_MIN_NC = 3


def frame_widths(flag: np.ndarray, nc: np.ndarray) -> np.ndarray:
    """Serialized width in bits of each frame (6, 14, 14+nc or 19+nc)."""
    flag = np.asarray(flag, dtype=np.int64)
    nc = np.asarray(nc, dtype=np.int64)
    w = np.full(flag.shape, 6, dtype=np.int64)
    w[flag == FLAG_SPECIAL] += 8
    alpha = flag == FLAG_ALPHA
    w[alpha] += nc[alpha] + 8
    w[alpha & (nc >= MAIN_MIN_NC)] += 5
    return w


# -- numpy path ---------------------------------------------------------------

def _field_table(flag, nc, cs, ic, pos):
    """Flatten frames into (values, widths) in stream order, dropping absent fields."""
    n = flag.shape[0]
    flag = flag.astype(np.int64)
    nc = nc.astype(np.int64)
    values = np.zeros((n, 5), dtype=np.int64)
    widths = np.zeros((n, 5), dtype=np.int64)
    values[:, 0], widths[:, 0] = flag, 2
    values[:, 1], widths[:, 1] = nc, 4
    alpha = flag == FLAG_ALPHA
    values[:, 2] = cs
    widths[alpha, 2] = nc[alpha]
    main = alpha & (nc >= MAIN_MIN_NC)
    values[:, 3] = ic
    widths[main, 3] = 5
    values[:, 4] = pos
    widths[(flag == FLAG_SPECIAL) | alpha, 4] = 8
    values, widths = values.ravel(), widths.ravel()
    keep = widths > 0
    return values[keep], widths[keep]


def _pack_frames_numpy(flag, nc, cs, ic, pos):
    values, widths = _field_table(flag, nc, cs, ic, pos)
    nbits = int(widths.sum())
    if nbits == 0:
        return np.zeros(0, dtype=np.uint8), 0
    starts = np.cumsum(widths) - widths
    owner_width = np.repeat(widths, widths)
    offset = np.arange(nbits, dtype=np.int64) - np.repeat(starts, widths)
    bits = (np.repeat(values, widths) >> (owner_width - 1 - offset)) & 1
    return np.packbits(bits.astype(np.uint8)), nbits


def _unpack_frames_numpy(payload, count):
    bits = np.unpackbits(np.asarray(payload, dtype=np.uint8)).astype(np.int64)
    total = bits.shape[0]
    out = np.zeros((5, count), dtype=np.uint32)
    weights = 1 << np.arange(15, -1, -1, dtype=np.int64)
    cursor = 0

    def take(width):
        nonlocal cursor
        if cursor + width > total:
            raise _Truncated
        v = int(bits[cursor:cursor + width] @ weights[16 - width:])
        cursor += width
        return v

    for i in range(count):
        start = cursor
        try:
            f = take(2)
            n = take(4)
            if n == 0:
                return out, ZERO_COUNT, i, start
            out[0, i], out[1, i] = f, n
            if f == FLAG_ALPHA:
                out[2, i] = take(n)
                if n >= MAIN_MIN_NC:
                    c = take(5)
                    if c < 1 or c > 26:
                        return out, BAD_INITIAL, i, start
                    out[3, i] = c
            if f >= FLAG_SPECIAL:
                out[4, i] = take(8)
        except _Truncated:
            return out, TRUNCATED, i, start
    return out, OK, count, cursor


class _Truncated(Exception):
    pass


# -- numba path ---------------------------------------------------------------

if HAVE_NUMBA:
    from numba import njit

    @njit(**numba_default)
    def _pack_frames_numba(flag, nc, cs, ic, pos):
        n = flag.shape[0]
        nbits = 0
        for i in range(n):
            f = flag[i]
            k = nc[i]
            nbits += 6
            if f == FLAG_SPECIAL:
                nbits += 8
            elif f == FLAG_ALPHA:
                nbits += k + 8
                if k >= MAIN_MIN_NC:
                    nbits += 5
        out = np.zeros((nbits + 7) // 8, dtype=np.uint8)
        acc = np.uint64(0)
        nacc = 0
        j = 0
        for i in range(n):
            f = np.uint64(flag[i])
            k = nc[i]
            # acc holds at most 7 leftover bits plus one field of <= 15 bits
            for fld in range(5):
                if fld == 0:
                    v = f
                    w = 2
                elif fld == 1:
                    v = np.uint64(k)
                    w = 4
                elif fld == 2:
                    if f != FLAG_ALPHA:
                        continue
                    v = np.uint64(cs[i])
                    w = k
                elif fld == 3:
                    if f != FLAG_ALPHA or k < MAIN_MIN_NC:
                        continue
                    v = np.uint64(ic[i])
                    w = 5
                else:
                    if f < FLAG_SPECIAL:
                        continue
                    v = np.uint64(pos[i])
                    w = 8
                acc = (acc << np.uint64(w)) | (v & ((np.uint64(1) << np.uint64(w)) - np.uint64(1)))
                nacc += w
                while nacc >= 8:
                    nacc -= 8
                    out[j] = np.uint8((acc >> np.uint64(nacc)) & np.uint64(0xFF))
                    j += 1
                acc &= (np.uint64(1) << np.uint64(nacc)) - np.uint64(1)
        if nacc > 0:
            out[j] = np.uint8((acc << np.uint64(8 - nacc)) & np.uint64(0xFF))
        return out, nbits

    @njit(**numba_default)
    def _read(payload, cursor, width):
        v = 0
        for b in range(cursor, cursor + width):
            v = (v << 1) | ((payload[b >> 3] >> (7 - (b & 7))) & 1)
        return v

    @njit(**numba_default)
    def _unpack_frames_numba(payload, count):
        total = payload.shape[0] * 8
        out = np.zeros((5, count), dtype=np.uint32)
        cursor = 0
        for i in range(count):
            start = cursor
            if cursor + 6 > total:
                return out, TRUNCATED, i, start
            f = _read(payload, cursor, 2)
            n = _read(payload, cursor + 2, 4)
            cursor += 6
            if n == 0:
                return out, ZERO_COUNT, i, start
            out[0, i] = f
            out[1, i] = n
            if f == FLAG_ALPHA:
                if cursor + n > total:
                    return out, TRUNCATED, i, start
                out[2, i] = _read(payload, cursor, n)
                cursor += n
                if n >= MAIN_MIN_NC:
                    if cursor + 5 > total:
                        return out, TRUNCATED, i, start
                    c = _read(payload, cursor, 5)
                    cursor += 5
                    if c < 1 or c > 26:
                        return out, BAD_INITIAL, i, start
                    out[3, i] = c
            if f >= FLAG_SPECIAL:
                if cursor + 8 > total:
                    return out, TRUNCATED, i, start
                out[4, i] = _read(payload, cursor, 8)
                cursor += 8
        return out, OK, count, cursor
else:
    _pack_frames_numba = None
    _unpack_frames_numba = None

BACKEND = "numba" if HAVE_NUMBA else "numpy"


def _as_u32(*arrays):
    return tuple(np.ascontiguousarray(a, dtype=np.uint32) for a in arrays)


def pack_frames(flag, nc, cs, ic, pos, backend: str | None = None):
    """Pack frame arrays into bytes. Returns ``(payload_bytes, payload_bit_length)``."""
    args = _as_u32(flag, nc, cs, ic, pos)
    impl = _pick(backend, _pack_frames_numba, _pack_frames_numpy)
    out, nbits = impl(*args)
    return out.tobytes(), int(nbits)


def unpack_frames(payload: bytes, count: int, backend: str | None = None):
    """Decode ``count`` frames.

    Returns ``(fields, status, frames_read, bits_used)`` where ``fields`` is a
    ``(5, count)`` array of flag, nc, cs, ic, pos and ``status`` is one of
    ``OK``, ``TRUNCATED``, ``ZERO_COUNT``, ``BAD_INITIAL``. On failure
    ``bits_used`` is the bit offset where the failing frame starts.
    """
    buf = np.frombuffer(bytes(payload), dtype=np.uint8)
    impl = _pick(backend, _unpack_frames_numba, _unpack_frames_numpy)
    out, status, read, used = impl(buf, int(count))
    return out, int(status), int(read), int(used)


def _pick(backend, numba_impl, numpy_impl):
    backend = backend or BACKEND
    if backend == "numba":
        if numba_impl is None:
            raise RuntimeError("numba backend requested but numba is unavailable or disabled")
        return numba_impl
    if backend == "numpy":
        return numpy_impl
    raise ValueError(f"unknown backend {backend!r}")
