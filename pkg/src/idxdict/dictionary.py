"""Centralized three-part word dictionary.

* main: alphabetic words of 3..15 letters, bucketed by (initial letter, length)
* short: alphabetic words of 1..2 letters in one flat list
* special: any word containing a non-letter byte, bucketed by byte length

Every part is append-only. A word keeps its position forever, which is what
lets a container written against an older state decode under a newer one.
"""
from __future__ import annotations

import os
import re
import secrets
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple, Union

from .errors import BucketFull, CorruptDictionaryFile, NotAlphabetic, PositionUnknown

BUCKET_CAPACITY = 256
MAX_NC = 15
MAIN_MIN_NC = 3
ALPHABET_SIZE = 26

MAGIC_LINE = "IDXDICT v1"

_LOWER_RE = re.compile(r"[a-z]+\Z")
_ALPHA_RE = re.compile(rb"[A-Za-z]+\Z")


def normalize(word: Union[str, bytes]) -> str:
    """Lowercase an alphabetic word. Only ASCII letters count as alphabetic."""
    raw = word.encode("latin-1") if isinstance(word, str) else bytes(word)
    if not _ALPHA_RE.match(raw):
        raise NotAlphabetic(f"{word!r} is not purely alphabetic")
    return raw.decode("ascii").lower()


def letter_index(ch: str) -> int:
    """1 for 'a' through 26 for 'z'."""
    return ord(ch) - ord("a") + 1


@dataclass
class DictionaryStats:
    id: int
    seq: int
    main_entries: int
    short_entries: int
    special_entries: int
    # bucket label -> occupancy; labels are ("main", ic, nc), ("short",), ("special", nc)
    occupancy: Dict[tuple, int] = field(default_factory=dict)

    def format(self) -> str:
        lines = [
            f"id       {self.id:016x}",
            f"seq      {self.seq}",
            f"main     {self.main_entries}",
            f"short    {self.short_entries}",
            f"special  {self.special_entries}",
        ]
        for label, count in sorted(self.occupancy.items()):
            lines.append("  " + " ".join(str(p) for p in label) + f": {count}")
        return "\n".join(lines)


class _Bucket:
    """Ordered word list plus reverse index."""

    __slots__ = ("words", "index")

    def __init__(self) -> None:
        self.words: list = []
        self.index: dict = {}

    def __len__(self) -> int:
        return len(self.words)


class Dictionary:
    def __init__(self, id: int | None = None) -> None:
        self.id = secrets.randbits(64) if id is None else id
        if not 0 <= self.id < 1 << 64:
            raise ValueError("dictionary id must be a 64-bit unsigned integer")
        self.seq = 0
        self._main: Dict[Tuple[int, int], _Bucket] = {}
        self._short = _Bucket()
        self._special: Dict[int, _Bucket] = {}
        self._lock = threading.Lock()

    # -- insertion -------------------------------------------------------

    def _append(self, bucket: _Bucket, word, where: str) -> int:
        pos = bucket.index.get(word)
        if pos is not None:
            return pos
        with self._lock:
            pos = bucket.index.get(word)
            if pos is not None:
                return pos
            pos = len(bucket.words)
            if pos >= BUCKET_CAPACITY:
                raise BucketFull(f"{where} already holds {BUCKET_CAPACITY} words")
            bucket.words.append(word)
            bucket.index[word] = pos
            self.seq += 1
        return pos

    def find_or_insert_main(self, word: str, nc: int | None = None) -> Tuple[int, int]:
        """Return ``(ic, pos)`` for a lowercase word of 3..15 letters, appending it on a miss."""
        if nc is None:
            nc = len(word)
        if len(word) != nc or not MAIN_MIN_NC <= nc <= MAX_NC or not _LOWER_RE.match(word):
            raise ValueError(f"main dictionary needs a lowercase word of length {MAIN_MIN_NC}..{MAX_NC}: {word!r}")
        ic = letter_index(word[0])
        bucket = self._main.get((ic, nc))
        if bucket is None:
            with self._lock:
                bucket = self._main.setdefault((ic, nc), _Bucket())
        return ic, self._append(bucket, word, f"main bucket ({ic}, {nc})")

    def find_or_insert_short(self, word: str) -> int:
        if not 1 <= len(word) <= 2 or not _LOWER_RE.match(word):
            raise ValueError(f"short dictionary needs a lowercase word of 1-2 letters: {word!r}")
        return self._append(self._short, word, "short dictionary")

    def find_or_insert_special(self, word: bytes, nc: int | None = None) -> int:
        word = bytes(word)
        if nc is None:
            nc = len(word)
        if len(word) != nc or not 1 <= nc <= MAX_NC:
            raise ValueError(f"special word must be 1..{MAX_NC} bytes and match nc: {word!r}")
        bucket = self._special.get(nc)
        if bucket is None:
            with self._lock:
                bucket = self._special.setdefault(nc, _Bucket())
        return self._append(bucket, word, f"special bucket {nc}")

    # -- lookup ----------------------------------------------------------

    @staticmethod
    def _get(bucket: _Bucket | None, pos: int, where: str):
        if bucket is None or not 0 <= pos < len(bucket.words):
            raise PositionUnknown(f"no entry at {where} pos {pos}")
        return bucket.words[pos]

    def lookup_main(self, ic: int, nc: int, pos: int) -> str:
        return self._get(self._main.get((ic, nc)), pos, f"main ({ic}, {nc})")

    def lookup_short(self, pos: int) -> str:
        return self._get(self._short, pos, "short")

    def lookup_special(self, nc: int, pos: int) -> bytes:
        return self._get(self._special.get(nc), pos, f"special {nc}")

    # -- introspection ---------------------------------------------------

    def entries(self):
        """Yield ``(part, key, pos, word)`` in file-format order."""
        for (ic, nc) in sorted(self._main):
            for pos, word in enumerate(list(self._main[(ic, nc)].words)):
                yield "main", (ic, nc), pos, word
        for pos, word in enumerate(list(self._short.words)):
            yield "short", (), pos, word
        for nc in sorted(self._special):
            for pos, word in enumerate(list(self._special[nc].words)):
                yield "special", (nc,), pos, word

    def stats(self) -> DictionaryStats:
        occupancy: Dict[tuple, int] = {}
        for (ic, nc), b in self._main.items():
            if b.words:
                occupancy[("main", ic, nc)] = len(b)
        if self._short.words:
            occupancy[("short",)] = len(self._short)
        for nc, b in self._special.items():
            if b.words:
                occupancy[("special", nc)] = len(b)
        return DictionaryStats(
            id=self.id,
            seq=self.seq,
            main_entries=sum(len(b) for b in self._main.values()),
            short_entries=len(self._short),
            special_entries=sum(len(b) for b in self._special.values()),
            occupancy=occupancy,
        )

    def __len__(self) -> int:
        return self.seq

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dictionary):
            return NotImplemented
        return self.id == other.id and self.seq == other.seq and list(self.entries()) == list(other.entries())

    def __repr__(self) -> str:
        return f"Dictionary(id={self.id:016x}, seq={self.seq})"

    # -- persistence -----------------------------------------------------

    def dumps(self) -> str:
        out = [MAGIC_LINE, f"id {self.id:016x}", f"seq {self.seq}", "[MAIN]"]
        for (ic, nc) in sorted(self._main):
            out.extend(f"{ic} {nc} {pos} {w}" for pos, w in enumerate(list(self._main[(ic, nc)].words)))
        out.append("[SHORT]")
        out.extend(f"{pos} {w}" for pos, w in enumerate(list(self._short.words)))
        out.append("[SPECIAL]")
        for nc in sorted(self._special):
            out.extend(f"{nc} {pos} {escape_special(w)}" for pos, w in enumerate(list(self._special[nc].words)))
        return "\n".join(out) + "\n"

    def save(self, destination: Union[str, os.PathLike]) -> None:
        """Write the dictionary atomically (temp file in the same directory, then rename)."""
        destination = Path(destination)
        data = self.dumps().encode("utf-8")
        fd, tmp = tempfile.mkstemp(prefix=destination.name + ".", suffix=".tmp", dir=destination.parent or ".")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, destination)
        except BaseException:
            try:
                os.unlink(tmp)
            except FileNotFoundError:
                pass
            raise

    @classmethod
    def load(cls, source: Union[str, os.PathLike]) -> "Dictionary":
        try:
            text = Path(source).read_bytes().decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptDictionaryFile(f"{source}: not UTF-8") from exc
        return cls.loads(text)

    @classmethod
    def loads(cls, text: str) -> "Dictionary":
        return _parse(text)


# -- file format helpers ---------------------------------------------------

def escape_special(word: bytes) -> str:
    return "".join(
        chr(b) if 0x21 <= b <= 0x7E and b != 0x25 else f"%{b:02X}" for b in word
    )


_ESC_RE = re.compile(r"%([0-9A-Fa-f]{2})")


def unescape_special(text: str) -> bytes:
    out = bytearray()
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "%":
            m = _ESC_RE.match(text, i)
            if not m:
                raise CorruptDictionaryFile(f"bad escape in {text!r}")
            out.append(int(m.group(1), 16))
            i = m.end()
        elif 0x21 <= ord(ch) <= 0x7E:
            out.append(ord(ch))
            i += 1
        else:
            raise CorruptDictionaryFile(f"unescaped byte in special entry {text!r}")
    return bytes(out)


_INT_RE = re.compile(r"(0|[1-9][0-9]*)\Z")
_HEX_ID_RE = re.compile(r"id ([0-9a-f]{16})\Z")
_SEQ_RE = re.compile(r"seq (0|[1-9][0-9]*)\Z")
_SECTIONS = ("[MAIN]", "[SHORT]", "[SPECIAL]")


def _ints(parts: List[str], lineno: int) -> List[int]:
    for p in parts:
        if not _INT_RE.match(p):
            raise CorruptDictionaryFile(f"line {lineno}: expected integer, got {p!r}")
    return [int(p) for p in parts]


def _parse(text: str) -> Dictionary:
    if text.endswith("\n"):
        text = text[:-1]
    lines = text.split("\n")
    if len(lines) < 3 or lines[0] != MAGIC_LINE:
        raise CorruptDictionaryFile("bad magic line")
    m_id, m_seq = _HEX_ID_RE.match(lines[1]), _SEQ_RE.match(lines[2])
    if not m_id or not m_seq:
        raise CorruptDictionaryFile("malformed id/seq header")
    d = Dictionary(id=int(m_id.group(1), 16))
    declared_seq = int(m_seq.group(1))

    section = -1
    last_key: tuple = ()
    for lineno, line in enumerate(lines[3:], start=4):
        if line in _SECTIONS:
            idx = _SECTIONS.index(line)
            if idx <= section:
                raise CorruptDictionaryFile(f"line {lineno}: section {line} out of order")
            section = idx
            last_key = ()
            continue
        parts = line.split(" ")
        try:
            if section == 0:
                if len(parts) != 4:
                    raise CorruptDictionaryFile(f"line {lineno}: malformed main entry")
                ic, nc, pos = _ints(parts[:3], lineno)
                word = parts[3]
                last_key = _ascending(last_key, (ic, nc, pos), lineno)
                if not (_LOWER_RE.match(word) and len(word) == nc and MAIN_MIN_NC <= nc <= MAX_NC
                        and letter_index(word[0]) == ic):
                    raise CorruptDictionaryFile(f"line {lineno}: main entry violates its indices")
                bucket = d._main.get((ic, nc))
                expected = len(bucket) if bucket else 0
                if pos != expected or (bucket and word in bucket.index):
                    raise CorruptDictionaryFile(f"line {lineno}: position gap or duplicate in main ({ic}, {nc})")
                d.find_or_insert_main(word, nc)
            elif section == 1:
                if len(parts) != 2:
                    raise CorruptDictionaryFile(f"line {lineno}: malformed short entry")
                (pos,) = _ints(parts[:1], lineno)
                word = parts[1]
                last_key = _ascending(last_key, (pos,), lineno)
                if not (_LOWER_RE.match(word) and len(word) <= 2):
                    raise CorruptDictionaryFile(f"line {lineno}: bad short word {word!r}")
                if pos != len(d._short) or word in d._short.index:
                    raise CorruptDictionaryFile(f"line {lineno}: position gap or duplicate in short")
                d.find_or_insert_short(word)
            elif section == 2:
                if len(parts) != 3:
                    raise CorruptDictionaryFile(f"line {lineno}: malformed special entry")
                nc, pos = _ints(parts[:2], lineno)
                word = unescape_special(parts[2])
                last_key = _ascending(last_key, (nc, pos), lineno)
                if len(word) != nc or not 1 <= nc <= MAX_NC:
                    raise CorruptDictionaryFile(f"line {lineno}: special entry length mismatch")
                bucket = d._special.get(nc)
                expected = len(bucket) if bucket else 0
                if pos != expected or (bucket and word in bucket.index):
                    raise CorruptDictionaryFile(f"line {lineno}: position gap or duplicate in special {nc}")
                d.find_or_insert_special(word, nc)
            else:
                raise CorruptDictionaryFile(f"line {lineno}: entry outside any section")
        except BucketFull as exc:
            raise CorruptDictionaryFile(f"line {lineno}: {exc}") from exc

    if d.seq != declared_seq:
        raise CorruptDictionaryFile(f"seq {declared_seq} does not match {d.seq} entries")
    return d


def _ascending(last: tuple, key: tuple, lineno: int) -> tuple:
    if last and key <= last:
        raise CorruptDictionaryFile(f"line {lineno}: entries not in ascending order")
    return key
