"""Exception hierarchy.

Errors split into two families so the CLI can map them to exit codes:
``DictionaryError`` (dictionary storage, lookup and file format) and
``CodecError`` (bit streams, frames, containers, tokens).
"""


class IdxDictError(Exception):
    """Base class for every error raised by this package."""


class DictionaryError(IdxDictError):
    pass


class CodecError(IdxDictError):
    pass


# dictionary family
class NotAlphabetic(DictionaryError, ValueError):
    pass


class BucketFull(DictionaryError):
    pass


class PositionUnknown(DictionaryError, LookupError):
    pass


class CorruptDictionaryFile(DictionaryError):
    pass


# codec family
class ValueOverflow(CodecError, ValueError):
    pass


class TruncatedStream(CodecError):
    pass


class InvalidFrame(CodecError):
    pass


class LengthMismatch(CodecError, ValueError):
    pass


class MalformedToken(CodecError, ValueError):
    pass


class DictionaryFull(CodecError):
    """A dictionary bucket overflowed its 256 positions during compression."""


class DictionaryMismatch(CodecError):
    pass


class DictionaryTooOld(CodecError):
    pass


class TrailingGarbage(CodecError):
    pass


class BadContainer(CodecError):
    """Wrong magic, unsupported version or short header."""


class ZeroOriginal(CodecError, ZeroDivisionError):
    pass
