"""Lossless word-level text compression against a shared, append-only indexed dictionary."""

__version__ = "0.1.0"

from .codec import (
    CompressedContainer,
    Frame,
    apply_case,
    case_mask,
    compress,
    decompress,
    metrics,
)
from .dictionary import Dictionary, normalize
from .tokenizer import Kind, Token, detokenize, tokenize

__all__ = [
    "CompressedContainer",
    "Dictionary",
    "Frame",
    "Kind",
    "Token",
    "apply_case",
    "case_mask",
    "compress",
    "decompress",
    "detokenize",
    "metrics",
    "normalize",
    "tokenize",
]
