"""Canonical data model: passages, causal edges, annotations, raters.

All types are immutable after construction and safe to share across threads.
Phrases are whitespace-normalized at rest with original casing preserved;
case folding happens at tokenization time, not here.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Collection, Iterable, Mapping, Optional, Sequence

from .errors import EmptyPhrase, UnknownPassage, UnrecognizedDirection

logger = logging.getLogger(__name__)

_WS_RUN = re.compile(r"\s+")

_DIRECTION_ALIASES = {
    "positive": "increase",
    "increase": "increase",
    "+": "increase",
    "negative": "decrease",
    "decrease": "decrease",
    "-": "decrease",
}


class Direction(Enum):
    INCREASE = "increase"
    DECREASE = "decrease"


class Origin(Enum):
    HUMAN = "human"
    MODEL_FEW_SHOT = "model_few_shot"
    MODEL_FINE_TUNED = "model_fine_tuned"


class Split(Enum):
    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"
    UNASSIGNED = "unassigned"


def canonicalize_direction(raw: str) -> Direction:
    """Map a direction token to its canonical value.

    Accepts positive/increase/+ and negative/decrease/- case-insensitively,
    with surrounding whitespace ignored. Anything else raises
    UnrecognizedDirection.
    """
    key = raw.strip().lower()
    canonical = _DIRECTION_ALIASES.get(key)
    if canonical is None:
        raise UnrecognizedDirection(raw)
    return Direction(canonical)


def normalize_phrase(raw: str) -> str:
    """Collapse whitespace runs to single spaces and trim the ends.

    Raises EmptyPhrase when nothing remains.
    """
    phrase = _WS_RUN.sub(" ", raw).strip()
    if not phrase:
        raise EmptyPhrase(f"phrase is empty after normalization: {raw!r}")
    return phrase


@dataclass(frozen=True)
class CausalEdge:
    """One (source, target, direction) causal relation.

    An optional numeric weight is carried through for forward compatibility;
    it is ignored by every measure and excluded from equality.
    """

    source: str
    target: str
    direction: Direction
    weight: Optional[float] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "source", normalize_phrase(self.source))
        object.__setattr__(self, "target", normalize_phrase(self.target))

    def key(self) -> tuple[str, str, Direction]:
        return (self.source, self.target, self.direction)

    def flipped(self) -> "CausalEdge":
        """Same edge with the opposite direction (handy for test data)."""
        other = Direction.DECREASE if self.direction is Direction.INCREASE else Direction.INCREASE
        return CausalEdge(self.source, self.target, other, self.weight)


@dataclass(frozen=True)
class Passage:
    passage_id: str
    text: str
    provenance: str = ""
    split: Split = Split.UNASSIGNED

    def __post_init__(self) -> None:
        if not self.passage_id:
            raise ValueError("passage_id must be non-empty")
        if not self.text.strip():
            raise ValueError(f"passage {self.passage_id} has empty text")


@dataclass(frozen=True)
class Rater:
    rater_id: str
    display_name: str = ""

    def __post_init__(self) -> None:
        if not self.rater_id:
            raise ValueError("rater_id must be non-empty")


@dataclass(frozen=True)
class Annotation:
    """An edge set attributed to one passage and one annotator.

    Exact duplicate edges (same normalized source, target, direction) are
    dropped at construction, first occurrence kept; the count of dropped
    duplicates is retained as a diagnostic.
    """

    passage_id: str
    annotator_id: str
    edges: tuple[CausalEdge, ...]
    origin: Origin
    dropped_duplicates: int = field(default=0, compare=False)

    @property
    def annotation_id(self) -> str:
        return f"{self.passage_id}/{self.annotator_id}"


def build_annotation(
    passage_id: str,
    annotator_id: str,
    edges: Iterable[CausalEdge],
    origin: Origin,
    *,
    known_passages: Optional[Collection[str] | Mapping[str, Passage]] = None,
) -> Annotation:
    """Assemble an Annotation, deduplicating edges in input order.

    When known_passages is given, passage_id must be present in it;
    otherwise existence is the caller's responsibility.
    """
    if known_passages is not None and passage_id not in known_passages:
        raise UnknownPassage(f"passage {passage_id!r} does not exist")
    seen: set[tuple[str, str, Direction]] = set()
    kept: list[CausalEdge] = []
    dropped = 0
    for edge in edges:
        key = edge.key()
        if key in seen:
            dropped += 1
            continue
        seen.add(key)
        kept.append(edge)
    if dropped:
        logger.debug(
            "annotation %s/%s: dropped %d duplicate edge(s)", passage_id, annotator_id, dropped
        )
    return Annotation(
        passage_id=passage_id,
        annotator_id=annotator_id,
        edges=tuple(kept),
        origin=origin,
        dropped_duplicates=dropped,
    )


def validate_annotation(annotation: Annotation) -> list[str]:
    """Check the stored-edge invariants; returns problem descriptions.

    Useful as a validator over datasets that were not built through
    build_annotation (hand-edited files, external tools).
    """
    problems: list[str] = []
    seen: set[tuple[str, str, Direction]] = set()
    for i, edge in enumerate(annotation.edges):
        for attr in ("source", "target"):
            phrase = getattr(edge, attr)
            if not phrase or phrase != _WS_RUN.sub(" ", phrase).strip():
                problems.append(f"edge {i}: {attr} not whitespace-normalized: {phrase!r}")
        key = edge.key()
        if key in seen:
            problems.append(f"edge {i}: duplicate of an earlier edge")
        seen.add(key)
    return problems


def edges_from_pairs(pairs: Sequence[tuple[str, str, str]]) -> list[CausalEdge]:
    """Build edges from (source, target, direction-token) triples."""
    return [
        CausalEdge(source, target, canonicalize_direction(token))
        for source, target, token in pairs
    ]
