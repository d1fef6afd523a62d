"""Soft-thresholded edge classification and the F1-like score over edge sets.

A predicted edge counts as a true positive when some gold edge matches both
textual attributes (source, target) at or above the threshold and agrees on
direction; as a partial positive when the textual attributes match but the
direction differs; otherwise as a false positive. A gold edge is a false
negative when no predicted edge matches it. With partial positives enabled,
a textual match alone clears a gold edge; with them disabled, would-be
partial positives count as false positives and clearing a gold edge
requires direction agreement as well, which is what makes the disabled
variant reduce exactly to the classical F1 between edge sets under the
exact measure at threshold 1. Matching is existential: several predicted
edges may match one gold edge.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .errors import PassageMismatch
from .model import Annotation, CausalEdge
from .textsim import Measure


@dataclass(frozen=True)
class MatchCounts:
    tp: int
    pp: int
    fp: int
    fn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.pp, self.fp, self.fn) < 0:
            raise ValueError("match counts must be non-negative")


@dataclass(frozen=True)
class EdgeMetricConfig:
    """Measure, threshold, and the partial-positive switch.

    Textual attributes are fixed to {source, target} and the non-textual
    attribute to {direction}. Disabling partial positives folds would-be
    PP edges into FP (the starred measure variants); the FN rule is
    unaffected since it inspects textual attributes only.
    """

    measure: Measure
    threshold: float
    allow_partial_positives: bool = True

    def __post_init__(self) -> None:
        if not (self.threshold == self.threshold and abs(self.threshold) != float("inf")):
            raise ValueError("threshold must be finite")

    def with_threshold(self, threshold: float) -> "EdgeMetricConfig":
        return replace(self, threshold=threshold)


@dataclass(frozen=True)
class PairProfile:
    """Pairwise attribute similarities between a predicted and a gold edge set.

    Computing the profile once lets a threshold sweep reclassify cheaply;
    the similarity calls dominate the cost.
    """

    source_sims: tuple[tuple[float, ...], ...]
    target_sims: tuple[tuple[float, ...], ...]
    direction_equal: tuple[tuple[bool, ...], ...]
    n_predicted: int
    n_gold: int


def attrs_match(edge: CausalEdge, gold: CausalEdge, config: EdgeMetricConfig) -> bool:
    """True iff both textual attributes score at or above the threshold."""
    measure, t = config.measure, config.threshold
    return (
        measure.score(edge.source, gold.source) >= t
        and measure.score(edge.target, gold.target) >= t
    )


def similarity_profile(
    edges: Sequence[CausalEdge], gold_edges: Sequence[CausalEdge], measure: Measure
) -> PairProfile:
    source_sims = tuple(
        tuple(measure.score(e.source, g.source) for g in gold_edges) for e in edges
    )
    target_sims = tuple(
        tuple(measure.score(e.target, g.target) for g in gold_edges) for e in edges
    )
    direction_equal = tuple(
        tuple(e.direction is g.direction for g in gold_edges) for e in edges
    )
    return PairProfile(source_sims, target_sims, direction_equal, len(edges), len(gold_edges))


def classify_profile(
    profile: PairProfile, threshold: float, allow_partial_positives: bool
) -> MatchCounts:
    tp = pp = fp = 0
    gold_matched = [False] * profile.n_gold
    for i in range(profile.n_predicted):
        src_row = profile.source_sims[i]
        tgt_row = profile.target_sims[i]
        dir_row = profile.direction_equal[i]
        textual = False
        full = False
        for j in range(profile.n_gold):
            if src_row[j] >= threshold and tgt_row[j] >= threshold:
                textual = True
                if allow_partial_positives or dir_row[j]:
                    gold_matched[j] = True
                if dir_row[j]:
                    full = True
        if full:
            tp += 1
        elif textual and allow_partial_positives:
            pp += 1
        else:
            fp += 1
    fn = profile.n_gold - sum(gold_matched)
    return MatchCounts(tp=tp, pp=pp, fp=fp, fn=fn)


def classify_edges(
    edges: Sequence[CausalEdge], gold_edges: Sequence[CausalEdge], config: EdgeMetricConfig
) -> MatchCounts:
    profile = similarity_profile(edges, gold_edges, config.measure)
    return classify_profile(profile, config.threshold, config.allow_partial_positives)


def soft_f1(counts: MatchCounts) -> float:
    """(2 TP + PP) / (2 TP + PP + FP + FN); empty vs. empty scores 1."""
    denominator = 2 * counts.tp + counts.pp + counts.fp + counts.fn
    if denominator == 0:
        return 1.0
    return (2 * counts.tp + counts.pp) / denominator


def score_annotation(predicted: Annotation, gold: Annotation, config: EdgeMetricConfig) -> float:
    if predicted.passage_id != gold.passage_id:
        raise PassageMismatch(
            f"cannot score annotation for passage {predicted.passage_id!r} "
            f"against gold for passage {gold.passage_id!r}"
        )
    return soft_f1(classify_edges(predicted.edges, gold.edges, config))


def kernel_score(g1: Annotation, g2: Annotation, config: EdgeMetricConfig) -> float:
    """Symmetrized score: the mean of both argument orders."""
    return (score_annotation(g1, g2, config) + score_annotation(g2, g1, config)) / 2.0
