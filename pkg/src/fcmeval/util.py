"""Small shared helpers: tie-averaged ranks, deterministic serialization."""

from __future__ import annotations

import hashlib
import json
from typing import Mapping


def average_ranks(scores: Mapping[str, float], *, descending: bool = True) -> dict[str, float]:
    """Rank items 1..n by score, averaging ranks within tied groups.

    Ties are groups of exactly equal scores; the ordering of tied items
    does not affect their (shared) rank.
    """
    ordered = sorted(scores.items(), key=lambda kv: (-kv[1] if descending else kv[1], kv[0]))
    ranks: dict[str, float] = {}
    i = 0
    while i < len(ordered):
        j = i
        while j + 1 < len(ordered) and ordered[j + 1][1] == ordered[i][1]:
            j += 1
        shared = (i + 1 + j + 1) / 2.0
        for k in range(i, j + 1):
            ranks[ordered[k][0]] = shared
        i = j + 1
    return ranks


def canonical_json(value) -> str:
    """Stable JSON used for hashing and byte-reproducible files."""
    return json.dumps(value, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def sha256_of(value) -> str:
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()


def format_float(value: float) -> str:
    """Fixed 6-decimal formatting for exported CSV cells."""
    return f"{value:.6f}"
