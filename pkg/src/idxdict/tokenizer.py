"""Split a byte stream into space runs, newline runs, alphabetic and special words.

Letters are ASCII ``A-Z``/``a-z`` only. Every other byte that is not a space
(0x20) or newline (0x0A) is special, so CR, tabs, digits and high bytes all
survive a round trip. Nothing is longer than 15 units because the frame
count field is 4 bits wide; longer runs and words are chunked.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Union

from .errors import MalformedToken

MAX_TOKEN = 15

_RUN_RE = re.compile(rb" +|\n+|[^ \n]+")
_ALPHA_RE = re.compile(rb"[A-Za-z]+\Z")
# letters followed by exactly one trailing non-letter, e.g. b"friends,"
_TRAILING_PUNCT_RE = re.compile(rb"([A-Za-z]+)([^A-Za-z])\Z")


class Kind(enum.IntEnum):
    SPACE_RUN = 0
    NEWLINE_RUN = 1
    SPECIAL_WORD = 2
    ALPHA_WORD = 3


@dataclass(frozen=True)
class Token:
    kind: Kind
    value: Union[bytes, int]  # bytes for words, run length for space/newline runs

    @classmethod
    def spaces(cls, n: int) -> "Token":
        return cls(Kind.SPACE_RUN, n)

    @classmethod
    def newlines(cls, n: int) -> "Token":
        return cls(Kind.NEWLINE_RUN, n)

    @classmethod
    def alpha(cls, text: bytes) -> "Token":
        return cls(Kind.ALPHA_WORD, bytes(text))

    @classmethod
    def special(cls, text: bytes) -> "Token":
        return cls(Kind.SPECIAL_WORD, bytes(text))

    @property
    def nc(self) -> int:
        return self.value if isinstance(self.value, int) else len(self.value)

    def expand(self) -> bytes:
        validate(self)
        if self.kind is Kind.SPACE_RUN:
            return b" " * self.value
        if self.kind is Kind.NEWLINE_RUN:
            return b"\n" * self.value
        return self.value


def validate(tok: Token) -> None:
    """Raise MalformedToken unless ``tok`` satisfies its class constraints."""
    kind, v = tok.kind, tok.value
    if kind in (Kind.SPACE_RUN, Kind.NEWLINE_RUN):
        if isinstance(v, bool) or not isinstance(v, int) or not 1 <= v <= MAX_TOKEN:
            raise MalformedToken(f"run length must be 1..{MAX_TOKEN}: {tok}")
        return
    if not isinstance(v, bytes) or not 1 <= len(v) <= MAX_TOKEN:
        raise MalformedToken(f"word must be 1..{MAX_TOKEN} bytes: {tok}")
    if kind is Kind.ALPHA_WORD:
        if not _ALPHA_RE.match(v):
            raise MalformedToken(f"alpha word contains a non-letter: {tok}")
    elif kind is Kind.SPECIAL_WORD:
        if b"\n" in v or b" " in v[:-1]:
            raise MalformedToken(f"special word may only end in a single space: {tok}")
    else:
        raise MalformedToken(f"unknown token kind {kind!r}")


def _chunks(data: bytes, size: int = MAX_TOKEN) -> Iterator[bytes]:
    for i in range(0, len(data), size):
        yield data[i:i + size]


def _runs(kind: Kind, n: int) -> Iterator[Token]:
    while n > 0:
        k = min(n, MAX_TOKEN)
        yield Token(kind, k)
        n -= k


def tokenize(data: bytes) -> List[Token]:
    """Classify ``data`` into tokens whose concatenated expansions equal ``data``.

    A word made of letters plus one trailing non-letter is split into the
    letters and the punctuation byte; when a space follows, that space is
    absorbed into a two-byte special token (``b", "``).
    """
    data = bytes(data)
    tokens: List[Token] = []
    append = tokens.append
    eat_space = False
    for m in _RUN_RE.finditer(data):
        run = m.group()
        head = run[0]
        if head == 0x20:
            n = len(run) - 1 if eat_space else len(run)
            eat_space = False
            tokens.extend(_runs(Kind.SPACE_RUN, n))
            continue
        eat_space = False
        if head == 0x0A:
            tokens.extend(_runs(Kind.NEWLINE_RUN, len(run)))
        elif _ALPHA_RE.match(run):
            tokens.extend(Token(Kind.ALPHA_WORD, c) for c in _chunks(run))
        else:
            pm = _TRAILING_PUNCT_RE.match(run)
            if pm:
                tokens.extend(Token(Kind.ALPHA_WORD, c) for c in _chunks(pm.group(1)))
                punct = pm.group(2)
                end = m.end()
                if end < len(data) and data[end] == 0x20:
                    append(Token(Kind.SPECIAL_WORD, punct + b" "))
                    eat_space = True
                else:
                    append(Token(Kind.SPECIAL_WORD, punct))
            else:
                tokens.extend(Token(Kind.SPECIAL_WORD, c) for c in _chunks(run))
    return tokens


def detokenize(tokens: Iterable[Token]) -> bytes:
    return b"".join(t.expand() for t in tokens)
