"""End-to-end drivers shared by the CLI and the report generator."""

from __future__ import annotations

from typing import Optional, Sequence

from .analysis import (
    CorrelationSummary,
    PassageEval,
    TuneResult,
    correlation_summary,
    grid_search_threshold,
    human_ranking,
    paired_contrast,
    per_passage_correlations,
)
from .config import MeasureSetting, RunConfig
from .elo import Judgment, Leaderboard, TournamentConfig, gold_of, run_tournament
from .errors import InsufficientData, ValidationError
from .metrics import EdgeMetricConfig, classify_edges, soft_f1
from .storage import Dataset, ResultTable
from .textsim import MeasureConfig, MeasureKind, build_measure
from .util import format_float


def tournament_config(config: RunConfig) -> TournamentConfig:
    return TournamentConfig(k_factor=config.k_factor, initial_rating=config.initial_rating)


def leaderboards(
    dataset: Dataset, judgments: Sequence[Judgment], config: TournamentConfig
) -> dict[str, Leaderboard]:
    """One tournament per passage that has annotations."""
    by_passage: dict[str, list[Judgment]] = {}
    for judgment in judgments:
        by_passage.setdefault(judgment.passage_id, []).append(judgment)
    boards: dict[str, Leaderboard] = {}
    for pid in sorted(dataset.passages):
        annotation_ids = [a.annotation_id for a in dataset.annotations_for(pid)]
        if not annotation_ids:
            continue
        boards[pid] = run_tournament(
            by_passage.get(pid, []), config, annotation_ids=annotation_ids, passage_id=pid
        )
    return boards


def passage_evals(
    dataset: Dataset,
    boards: dict[str, Leaderboard],
    *,
    include_gold: bool = False,
) -> list[PassageEval]:
    evals = []
    for pid in sorted(boards):
        board = boards[pid]
        gold_id = gold_of(board)
        evals.append(
            PassageEval(
                passage_id=pid,
                annotations=tuple(dataset.annotations_for(pid)),
                gold_id=gold_id,
                human=human_ranking(board, include_gold=include_gold),
            )
        )
    return evals


def metric_config(setting: MeasureSetting, *, external_url: Optional[str] = None) -> EdgeMetricConfig:
    kind = MeasureKind(setting.kind)
    measure_config = (
        MeasureConfig(kind=kind, external_url=external_url)
        if kind is MeasureKind.EXTERNAL
        else MeasureConfig(kind=kind)
    )
    return EdgeMetricConfig(
        measure=build_measure(measure_config),
        threshold=setting.threshold,
        allow_partial_positives=setting.partial_positives,
    )


def correlation_for(
    evals: Sequence[PassageEval],
    config: EdgeMetricConfig,
    *,
    method: str = "t",
    seed: int = 0,
) -> CorrelationSummary:
    rhos, skipped = per_passage_correlations(evals, config)
    return correlation_summary(rhos, skipped=skipped, method=method, seed=seed)


def tune_threshold(
    evals: Sequence[PassageEval],
    config: EdgeMetricConfig,
    *,
    lo: float,
    hi: float,
    step: float,
) -> TuneResult:
    return grid_search_threshold(evals, config, lo=lo, hi=hi, step=step)


def score_rows(
    gold: Dataset, predicted: Dataset, config: EdgeMetricConfig
) -> list[tuple[str, int, int, int, int, float]]:
    """Per-passage (passage_id, tp, pp, fp, fn, score) for paired dataset files.

    Each file must carry exactly one annotation per shared passage.
    """
    rows = []
    for pid in sorted(set(gold.passages) & set(predicted.passages)):
        gold_annotations = gold.annotations_for(pid)
        pred_annotations = predicted.annotations_for(pid)
        if len(gold_annotations) != 1 or len(pred_annotations) != 1:
            raise ValidationError(
                0,
                f"passage {pid!r} must have exactly one annotation per file "
                f"(gold has {len(gold_annotations)}, predicted has {len(pred_annotations)})",
            )
        counts = classify_edges(pred_annotations[0].edges, gold_annotations[0].edges, config)
        rows.append((pid, counts.tp, counts.pp, counts.fp, counts.fn, soft_f1(counts)))
    return rows


def leaderboard_table(boards: dict[str, Leaderboard]) -> ResultTable:
    rows = []
    for pid in sorted(boards):
        for aid, rank, rating in boards[pid].ordered():
            rows.append((pid, aid, rank, rating, boards[pid].games_played.get(aid, 0)))
    return ResultTable(
        name="leaderboards",
        header=("passage_id", "annotation_id", "rank", "rating", "games"),
        rows=tuple(rows),
    )


def summary_row(label: str, threshold: float, summary: CorrelationSummary) -> tuple:
    return (
        label,
        threshold,
        summary.mean,
        summary.ci90[0],
        summary.ci90[1],
        summary.ci95[0],
        summary.ci95[1],
        len(summary.per_passage),
        summary.skipped,
    )


SUMMARY_HEADER = (
    "measure",
    "threshold",
    "mean_rho",
    "ci90_lo",
    "ci90_hi",
    "ci95_lo",
    "ci95_hi",
    "n_passages",
    "skipped",
)


def report_tables(dataset: Dataset, judgments: Sequence[Judgment], config: RunConfig) -> list[ResultTable]:
    """Deterministic report: leaderboards, per-measure correlations, contrasts."""
    boards = leaderboards(dataset, judgments, tournament_config(config))
    tables = [leaderboard_table(boards)]
    evals = passage_evals(dataset, boards, include_gold=config.include_gold_in_rankings)

    correlation_rows = []
    contrast_rows = []
    baseline_rhos = None
    baseline = MeasureSetting("exact", 1.0, partial_positives=False)
    try:
        baseline_cfg = metric_config(baseline)
        baseline_rhos, baseline_skipped = per_passage_correlations(evals, baseline_cfg)
        baseline_summary = correlation_summary(baseline_rhos, skipped=baseline_skipped)
        correlation_rows.append(summary_row("f1", baseline.threshold, baseline_summary))
    except InsufficientData:
        baseline_rhos = None

    for setting in config.measures:
        if setting.kind == "external":
            continue  # needs a live scorer; not part of the offline report
        cfg = metric_config(setting)
        try:
            rhos, skipped = per_passage_correlations(evals, cfg)
            summary = correlation_summary(rhos, skipped=skipped)
        except InsufficientData:
            continue
        label = setting.kind if setting.partial_positives else f"{setting.kind}_star"
        correlation_rows.append(summary_row(label, setting.threshold, summary))
        if baseline_rhos and {p for p, _ in rhos} == {p for p, _ in baseline_rhos}:
            contrast = paired_contrast(rhos, baseline_rhos)
            contrast_rows.append(summary_row(label, setting.threshold, contrast))

    tables.append(
        ResultTable(name="correlations", header=SUMMARY_HEADER, rows=tuple(correlation_rows))
    )
    tables.append(
        ResultTable(name="contrasts_vs_f1", header=SUMMARY_HEADER, rows=tuple(contrast_rows))
    )
    return tables


def curve_table(result: TuneResult) -> ResultTable:
    rows = tuple(
        (
            point.threshold,
            "" if point.mean_rho is None else format_float(point.mean_rho),
            point.n_passages,
            point.skipped,
        )
        for point in result.curve
    )
    return ResultTable(
        name="threshold_curve",
        header=("threshold", "mean_rho", "n_passages", "skipped"),
        rows=rows,
    )
