"""Measure-vs-human validation: rankings, Spearman correlation, confidence
intervals, paired contrasts, threshold grid search, and rater reliability."""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from scipy import stats as scipy_stats

from .elo import Judgment, Leaderboard, Outcome, gold_of
from .errors import (
    AlignmentError,
    DegenerateRanking,
    GoldMismatch,
    InsufficientData,
    ItemMismatch,
)
from .metrics import EdgeMetricConfig, score_annotation
from .model import Annotation
from .util import average_ranks


@dataclass(frozen=True)
class Ranking:
    """Tie-averaged ranks over a set of items; ranks sum to n(n+1)/2."""

    ranks: Mapping[str, float]

    def __post_init__(self) -> None:
        n = len(self.ranks)
        if n:
            total = sum(self.ranks.values())
            expected = n * (n + 1) / 2.0
            if not math.isclose(total, expected, rel_tol=0, abs_tol=1e-9):
                raise ValueError(f"ranks sum to {total}, expected {expected}")

    @property
    def items(self) -> list[str]:
        return sorted(self.ranks)

    def __len__(self) -> int:
        return len(self.ranks)


def ranking_from_scores(scores: Mapping[str, float], *, descending: bool = True) -> Ranking:
    return Ranking(average_ranks(scores, descending=descending))


def spearman(r1: Ranking, r2: Ranking) -> float:
    """Pearson correlation of the two rank vectors (tie-robust)."""
    if set(r1.ranks) != set(r2.ranks):
        raise ItemMismatch("rankings cover different item sets")
    n = len(r1)
    if n < 2:
        raise DegenerateRanking(f"need at least 2 items, got {n}")
    items = r1.items
    x = [r1.ranks[i] for i in items]
    y = [r2.ranks[i] for i in items]
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    var_x = sum((v - mean_x) ** 2 for v in x)
    var_y = sum((v - mean_y) ** 2 for v in y)
    if var_x == 0 or var_y == 0:
        raise DegenerateRanking("a rank vector is constant; correlation undefined")
    cov = sum((a - mean_x) * (b - mean_y) for a, b in zip(x, y))
    return cov / math.sqrt(var_x * var_y)


def measure_ranking(
    annotations: Sequence[Annotation],
    gold_id: str,
    config: EdgeMetricConfig,
    *,
    include_gold: bool = False,
) -> Ranking:
    """Rank annotations by their score against the gold, best first.

    The gold annotation itself is excluded by default: its score is
    trivially maximal and would inflate the correlation with the human
    ranking, where it is the tournament winner.
    """
    by_id = {a.annotation_id: a for a in annotations}
    if gold_id not in by_id:
        raise GoldMismatch(f"gold annotation {gold_id!r} not among the annotations")
    gold = by_id[gold_id]
    scores = {
        aid: score_annotation(a, gold, config)
        for aid, a in by_id.items()
        if include_gold or aid != gold_id
    }
    return ranking_from_scores(scores, descending=True)


def human_ranking(
    leaderboard: Leaderboard, gold_id: Optional[str] = None, *, include_gold: bool = False
) -> Ranking:
    """Elo ranking restricted to non-gold annotations, ties averaged."""
    actual_gold = gold_of(leaderboard)
    if gold_id is not None and gold_id != actual_gold:
        raise GoldMismatch(
            f"stated gold {gold_id!r} is not the tournament winner {actual_gold!r}"
        )
    ratings = {
        aid: rating
        for aid, rating in leaderboard.ratings.items()
        if include_gold or aid != actual_gold
    }
    return ranking_from_scores(ratings, descending=True)


@dataclass(frozen=True)
class CorrelationSummary:
    per_passage: tuple[tuple[str, float], ...]
    mean: float
    ci90: tuple[float, float]
    ci95: tuple[float, float]
    skipped: int = 0
    method: str = "t"


def _t_interval(values: Sequence[float], level: float) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return (mean, mean)
    sd = statistics.stdev(values)
    if sd == 0.0:
        return (mean, mean)
    half = float(scipy_stats.t.ppf((1 + level) / 2.0, n - 1)) * sd / math.sqrt(n)
    return (mean - half, mean + half)


def _bootstrap_interval(
    values: Sequence[float], level: float, seed: int, n_resamples: int
) -> tuple[float, float]:
    rng = random.Random(seed)
    n = len(values)
    means = sorted(
        sum(rng.choice(values) for _ in range(n)) / n for _ in range(n_resamples)
    )
    alpha = (1 - level) / 2.0
    lo = means[int(alpha * (n_resamples - 1))]
    hi = means[int((1 - alpha) * (n_resamples - 1))]
    return (lo, hi)


def correlation_summary(
    per_passage: Sequence[tuple[str, float]],
    *,
    skipped: int = 0,
    method: str = "t",
    seed: int = 0,
    n_resamples: int = 10_000,
) -> CorrelationSummary:
    """Mean per-passage correlation with 90% and 95% confidence intervals.

    The default interval is Student-t over the per-passage sample; a seeded
    bootstrap is available for sensitivity analysis.
    """
    if len(per_passage) < 2:
        raise InsufficientData(
            f"need correlations from at least 2 passages, got {len(per_passage)}"
        )
    values = [rho for _, rho in per_passage]
    mean = sum(values) / len(values)
    if method == "t":
        ci90 = _t_interval(values, 0.90)
        ci95 = _t_interval(values, 0.95)
    elif method == "bootstrap":
        ci90 = _bootstrap_interval(values, 0.90, seed, n_resamples)
        ci95 = _bootstrap_interval(values, 0.95, seed, n_resamples)
    else:
        raise ValueError(f"unknown interval method: {method!r}")
    return CorrelationSummary(
        per_passage=tuple(per_passage),
        mean=mean,
        ci90=ci90,
        ci95=ci95,
        skipped=skipped,
        method=method,
    )


def paired_contrast(
    measure_rhos: Sequence[tuple[str, float]],
    baseline_rhos: Sequence[tuple[str, float]],
    *,
    method: str = "t",
    seed: int = 0,
    n_resamples: int = 10_000,
) -> CorrelationSummary:
    """Summary of per-passage differences (measure - baseline)."""
    baseline = dict(baseline_rhos)
    if len(baseline) != len(baseline_rhos):
        raise AlignmentError("duplicate passage ids in the baseline sample")
    measure_ids = [pid for pid, _ in measure_rhos]
    if len(set(measure_ids)) != len(measure_ids) or set(measure_ids) != set(baseline):
        raise AlignmentError("per-passage samples are not aligned")
    differences = [(pid, rho - baseline[pid]) for pid, rho in measure_rhos]
    return correlation_summary(differences, method=method, seed=seed, n_resamples=n_resamples)


@dataclass(frozen=True)
class PassageEval:
    """One passage's material for measure validation: the annotations, the
    tournament winner (gold), and the human ranking over non-gold entries."""

    passage_id: str
    annotations: tuple[Annotation, ...]
    gold_id: str
    human: Ranking


def per_passage_correlations(
    passages: Sequence[PassageEval], config: EdgeMetricConfig
) -> tuple[list[tuple[str, float]], int]:
    """Spearman between measure and human rankings per passage.

    Passages whose rankings are degenerate (fewer than two non-gold
    annotations, or constant ranks) are skipped and counted.
    """
    rhos: list[tuple[str, float]] = []
    skipped = 0
    for passage in passages:
        try:
            measured = measure_ranking(passage.annotations, passage.gold_id, config)
            rhos.append((passage.passage_id, spearman(measured, passage.human)))
        except DegenerateRanking:
            skipped += 1
    return rhos, skipped


@dataclass(frozen=True)
class GridPoint:
    threshold: float
    mean_rho: Optional[float]
    n_passages: int
    skipped: int


@dataclass(frozen=True)
class TuneResult:
    threshold: float
    mean_rho: Optional[float]
    curve: tuple[GridPoint, ...]


def _grid_points(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0:
        raise ValueError("grid step must be positive")
    if hi < lo:
        raise ValueError("grid upper bound below lower bound")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def _evaluate_grid(
    passages: Sequence[PassageEval],
    config: EdgeMetricConfig,
    thresholds: Sequence[float],
) -> list[GridPoint]:
    points = []
    for t in thresholds:
        rhos, skipped = per_passage_correlations(passages, config.with_threshold(t))
        mean_rho = sum(r for _, r in rhos) / len(rhos) if rhos else None
        points.append(GridPoint(t, mean_rho, len(rhos), skipped))
    return points


def grid_search_threshold(
    passages: Sequence[PassageEval],
    config: EdgeMetricConfig,
    *,
    lo: float,
    hi: float,
    step: float,
) -> TuneResult:
    """Pick the threshold maximizing mean Spearman correlation.

    One refinement pass re-evaluates around the coarse argmax with half
    the step. Ties (including all-degenerate grids) resolve to the
    smallest threshold.
    """
    coarse = _grid_points(lo, hi, step)
    if not coarse:
        raise ValueError("empty threshold grid")
    evaluated: dict[float, GridPoint] = {
        p.threshold: p for p in _evaluate_grid(passages, config, coarse)
    }

    def best_threshold() -> float:
        return min(
            evaluated,
            key=lambda t: (
                -(evaluated[t].mean_rho if evaluated[t].mean_rho is not None else -math.inf),
                t,
            ),
        )

    t_star = best_threshold()
    if len(coarse) > 1:
        refined = [
            t
            for t in _grid_points(max(lo, t_star - step), min(hi, t_star + step), step / 2.0)
            if t not in evaluated
        ]
        for point in _evaluate_grid(passages, config, refined):
            evaluated[point.threshold] = point
        t_star = best_threshold()

    curve = tuple(sorted(evaluated.values(), key=lambda p: p.threshold))
    return TuneResult(threshold=t_star, mean_rho=evaluated[t_star].mean_rho, curve=curve)


@dataclass(frozen=True)
class PairAgreement:
    passage_id: str
    annotation_pair: tuple[str, str]
    n_judgments: int
    n_raters: int
    agreement: float


@dataclass(frozen=True)
class ReliabilityReport:
    pair_agreements: tuple[PairAgreement, ...]
    agreement_histogram: tuple[tuple[float, int], ...]
    self_consistency: Mapping[str, float]
    overall_self_consistency: Optional[float]


def _normalized_outcome(judgment: Judgment) -> str:
    if judgment.outcome is Outcome.TIE:
        return "tie"
    winner = (
        judgment.annotation_a if judgment.outcome is Outcome.A_WINS else judgment.annotation_b
    )
    return f"win:{winner}"


def rater_reliability(judgments: Sequence[Judgment]) -> ReliabilityReport:
    """Agreement over multiply-judged pairs and per-rater self-consistency."""
    by_pair: dict[tuple[str, str, str], list[Judgment]] = {}
    for j in judgments:
        a, b = sorted((j.annotation_a, j.annotation_b))
        by_pair.setdefault((j.passage_id, a, b), []).append(j)

    agreements: list[PairAgreement] = []
    for (pid, a, b), group in sorted(by_pair.items()):
        if len(group) < 2:
            continue
        outcomes = [_normalized_outcome(j) for j in group]
        modal = max(outcomes.count(o) for o in set(outcomes))
        agreements.append(
            PairAgreement(
                passage_id=pid,
                annotation_pair=(a, b),
                n_judgments=len(group),
                n_raters=len({j.rater_id for j in group}),
                agreement=modal / len(group),
            )
        )

    histogram: dict[float, int] = {}
    for pa in agreements:
        histogram[pa.agreement] = histogram.get(pa.agreement, 0) + 1

    consistent_by_rater: dict[str, list[bool]] = {}
    for (pid, a, b), group in sorted(by_pair.items()):
        by_rater: dict[str, list[str]] = {}
        for j in group:
            by_rater.setdefault(j.rater_id, []).append(_normalized_outcome(j))
        for rater, outcomes in by_rater.items():
            if len(outcomes) >= 2:
                consistent_by_rater.setdefault(rater, []).append(len(set(outcomes)) == 1)

    self_consistency = {
        rater: sum(flags) / len(flags) for rater, flags in sorted(consistent_by_rater.items())
    }
    all_flags = [flag for flags in consistent_by_rater.values() for flag in flags]
    overall = sum(all_flags) / len(all_flags) if all_flags else None

    return ReliabilityReport(
        pair_agreements=tuple(agreements),
        agreement_histogram=tuple(sorted(histogram.items())),
        self_consistency=self_consistency,
        overall_self_consistency=overall,
    )
