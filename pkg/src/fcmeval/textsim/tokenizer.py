"""Word tokenization shared by every textual similarity backend."""

from __future__ import annotations

import string

_STRIP = string.punctuation

TokenSeq = tuple[str, ...]


def tokenize(raw: str) -> TokenSeq:
    """Lowercase, split on whitespace, strip surrounding punctuation.

    Tokens that are empty after stripping are dropped; empty input yields
    an empty sequence.
    """
    tokens = []
    for piece in raw.lower().split():
        piece = piece.strip(_STRIP)
        if piece:
            tokens.append(piece)
    return tuple(tokens)
