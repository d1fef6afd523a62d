"""Per-passage Elo tournaments over pairwise judgments.

Ratings update sequentially with R' = R + K(S - E), where the expected
score is E_A = 1 / (1 + 10^((R_B - R_A)/400)) and the actual score is 1,
0, or 0.5 for a draw. Sequential Elo is order-sensitive, so tournaments
process judgments in a canonical order (sorted by judgment id) to keep
leaderboards reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    EmptyLeaderboard,
    MixedPassages,
    NoEligibleRater,
    SelfRating,
    UnknownAnnotation,
)
from .util import average_ranks


class Outcome(str, Enum):
    A_WINS = "a_wins"
    B_WINS = "b_wins"
    TIE = "tie"


_ACTUAL_SCORES = {
    Outcome.A_WINS: (1.0, 0.0),
    Outcome.B_WINS: (0.0, 1.0),
    Outcome.TIE: (0.5, 0.5),
}


@dataclass(frozen=True)
class Judgment:
    judgment_id: str
    passage_id: str
    annotation_a: str
    annotation_b: str
    outcome: Outcome
    rater_id: str
    submitted_at: str = ""

    def __post_init__(self) -> None:
        if self.annotation_a == self.annotation_b:
            raise ValueError("a judgment must compare two distinct annotations")


@dataclass(frozen=True)
class TournamentConfig:
    k_factor: float = 32.0
    initial_rating: float = 1000.0

    def __post_init__(self) -> None:
        if self.k_factor <= 0:
            raise ValueError("k_factor must be positive")


@dataclass(frozen=True)
class Leaderboard:
    passage_id: str
    ratings: Mapping[str, float]
    ranking: Mapping[str, float]  # annotation id -> tie-averaged rank
    games_played: Mapping[str, int]

    def ordered(self) -> list[tuple[str, float, float]]:
        """(annotation_id, rank, rating) rows, best first."""
        return sorted(
            ((aid, self.ranking[aid], self.ratings[aid]) for aid in self.ratings),
            key=lambda row: (row[1], row[0]),
        )


def expected_scores(r_a: float, r_b: float) -> tuple[float, float]:
    e_a = 1.0 / (1.0 + 10.0 ** ((r_b - r_a) / 400.0))
    e_b = 1.0 / (1.0 + 10.0 ** ((r_a - r_b) / 400.0))
    return e_a, e_b


def check_not_self_rating(judgment: Judgment, annotators: Mapping[str, str]) -> None:
    """Raise SelfRating when the rater authored either side.

    annotators maps annotation id -> annotator id; annotations missing
    from the mapping are not checked.
    """
    for aid in (judgment.annotation_a, judgment.annotation_b):
        if annotators.get(aid) == judgment.rater_id:
            raise SelfRating(
                f"rater {judgment.rater_id!r} judged their own annotation {aid!r}"
            )


def apply_judgment(
    ratings: Mapping[str, float],
    judgment: Judgment,
    config: TournamentConfig,
    *,
    annotators: Optional[Mapping[str, str]] = None,
    seed_missing: bool = True,
) -> dict[str, float]:
    """Return updated ratings after one game; the input mapping is not mutated."""
    if annotators is not None:
        check_not_self_rating(judgment, annotators)
    updated = dict(ratings)
    for aid in (judgment.annotation_a, judgment.annotation_b):
        if aid not in updated:
            if not seed_missing:
                raise UnknownAnnotation(f"annotation {aid!r} is not rated")
            updated[aid] = config.initial_rating
    r_a = updated[judgment.annotation_a]
    r_b = updated[judgment.annotation_b]
    e_a, e_b = expected_scores(r_a, r_b)
    s_a, s_b = _ACTUAL_SCORES[judgment.outcome]
    updated[judgment.annotation_a] = r_a + config.k_factor * (s_a - e_a)
    updated[judgment.annotation_b] = r_b + config.k_factor * (s_b - e_b)
    return updated


def run_tournament(
    judgments: Sequence[Judgment],
    config: TournamentConfig,
    *,
    annotation_ids: Iterable[str] = (),
    passage_id: Optional[str] = None,
) -> Leaderboard:
    """Compute the leaderboard for one passage.

    Annotations listed in annotation_ids participate even with zero games
    (they stay at the initial rating). Judgments are applied sorted by
    judgment id, so replaying the same log always reproduces the board.
    """
    passages = {j.passage_id for j in judgments}
    if passage_id is not None:
        passages.add(passage_id)
    if len(passages) > 1:
        raise MixedPassages(f"judgments span multiple passages: {sorted(passages)}")
    if not passages:
        raise MixedPassages("cannot infer the passage: no judgments and no passage_id")
    board_passage = passages.pop()

    ratings: dict[str, float] = {aid: config.initial_rating for aid in annotation_ids}
    games: dict[str, int] = {aid: 0 for aid in ratings}
    for judgment in sorted(judgments, key=lambda j: j.judgment_id):
        ratings = apply_judgment(ratings, judgment, config)
        for aid in (judgment.annotation_a, judgment.annotation_b):
            games[aid] = games.get(aid, 0) + 1
    ranking = average_ranks(ratings, descending=True)
    return Leaderboard(
        passage_id=board_passage,
        ratings=ratings,
        ranking=ranking,
        games_played=games,
    )


def gold_of(leaderboard: Leaderboard) -> str:
    """The top-rated annotation; exact rating ties break to the smallest id."""
    if not leaderboard.ratings:
        raise EmptyLeaderboard(f"no rated annotations for passage {leaderboard.passage_id!r}")
    return min(leaderboard.ratings, key=lambda aid: (-leaderboard.ratings[aid], aid))


@dataclass(frozen=True)
class PairAssignment:
    passage_id: str
    left: str  # annotation id shown on the left
    right: str
    rater_id: str
    is_overlap: bool = False


@dataclass(frozen=True)
class PairingPlan:
    assignments: tuple[PairAssignment, ...]
    skipped_overlaps: tuple[tuple[str, str, str], ...] = field(default_factory=tuple)


def build_pairings(
    annotations_by_passage: Mapping[str, Sequence[tuple[str, str]]],
    raters: Sequence[str],
    *,
    seed: int = 0,
    overlap_fraction: float = 0.2,
) -> PairingPlan:
    """Assign every unordered annotation pair to a rater who authored neither.

    annotations_by_passage maps passage id -> [(annotation_id, annotator_id)].
    Assignments are balanced by rater load, iterating raters in a seeded
    random order; a fraction of pairs additionally goes to a second rater
    for reliability overlap. Presentation sides are randomized. The whole
    plan is a pure function of the inputs and the seed.
    """
    if not 0.0 <= overlap_fraction <= 1.0:
        raise ValueError("overlap_fraction must be in [0, 1]")
    rng = random.Random(seed)
    rater_order = list(raters)
    rng.shuffle(rater_order)
    order_index = {r: i for i, r in enumerate(rater_order)}
    load: dict[str, int] = {r: 0 for r in rater_order}

    pairs: list[tuple[str, str, str, str, str]] = []  # passage, a, b, author_a, author_b
    for pid in sorted(annotations_by_passage):
        entries = list(annotations_by_passage[pid])
        for x in range(len(entries)):
            for y in range(x + 1, len(entries)):
                (a, author_a), (b, author_b) = entries[x], entries[y]
                pairs.append((pid, a, b, author_a, author_b))

    def pick(pid: str, authors: set[str], exclude: set[str]) -> Optional[str]:
        eligible = [r for r in rater_order if r not in authors and r not in exclude]
        if not eligible:
            return None
        chosen = min(eligible, key=lambda r: (load[r], order_index[r]))
        load[chosen] += 1
        return chosen

    assignments: list[PairAssignment] = []
    overlap_count = int(round(overlap_fraction * len(pairs)))
    overlap_set = set(rng.sample(range(len(pairs)), overlap_count)) if overlap_count else set()
    skipped: list[tuple[str, str, str]] = []

    for idx, (pid, a, b, author_a, author_b) in enumerate(pairs):
        authors = {author_a, author_b}
        first = pick(pid, authors, set())
        if first is None:
            raise NoEligibleRater(
                f"every rater authored one side of pair ({a!r}, {b!r}) in passage {pid!r}"
            )
        left, right = (a, b) if rng.random() < 0.5 else (b, a)
        assignments.append(PairAssignment(pid, left, right, first, is_overlap=False))
        if idx in overlap_set:
            second = pick(pid, authors, {first})
            if second is None:
                skipped.append((pid, a, b))
                continue
            left, right = (a, b) if rng.random() < 0.5 else (b, a)
            assignments.append(PairAssignment(pid, left, right, second, is_overlap=True))

    return PairingPlan(assignments=tuple(assignments), skipped_overlaps=tuple(skipped))
