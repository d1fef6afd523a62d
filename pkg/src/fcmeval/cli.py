"""Command-line entry point: one binary, one subcommand per pipeline stage.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import csv
import json
import sys
from pathlib import Path

import click

from . import pipeline
from .config import MeasureSetting, RunConfig, load_config, save_config
from .elo import build_pairings
from .errors import FcmEvalError
from .extraction import (
    CompletionClient,
    Dialect,
    EndpointConfig,
    ParseMode,
    PromptKind,
    PromptTemplate,
    extract_with_report,
)
from .model import Origin
from .storage import (
    JudgmentLog,
    ResultTable,
    Workspace,
    export_results,
    load_dataset,
    render_csv,
    save_dataset,
    save_schedule,
)
from .util import format_float

_MEASURES = ("exact", "bleu", "rouge1", "meteor", "external")


def _echo_table(table: ResultTable, out: Path | None) -> None:
    content = render_csv(table)
    if out is None:
        click.echo(content, nl=False)
    else:
        out.write_text(content, encoding="utf-8", newline="\n")


def _workspace(ctx: click.Context) -> Workspace:
    return Workspace(Path(ctx.obj["workspace"]))


@click.group()
@click.option(
    "--workspace",
    type=click.Path(file_okay=False),
    envvar="FCMEVAL_WORKSPACE",
    default=".",
    show_default=True,
    help="Workspace directory (env: FCMEVAL_WORKSPACE).",
)
@click.pass_context
def cli(ctx: click.Context, workspace: str) -> None:
    """Score causal-map annotations, run judgment tournaments, validate measures."""
    ctx.ensure_object(dict)
    ctx.obj["workspace"] = workspace


@cli.command()
@click.option("--dataset", "dataset_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--endpoint-url", required=True, help="Chat-completion endpoint URL.")
@click.option("--model", required=True)
@click.option(
    "--prompt-dialect",
    type=click.Choice(["bracket-inst", "header-tagged"]),
    default="bracket-inst",
    show_default=True,
)
@click.option(
    "--kind",
    type=click.Choice(["instruction", "zero-shot", "three-shot"]),
    default="instruction",
    show_default=True,
)
@click.option("--annotator-id", default="model", show_default=True)
@click.option("--temperature", type=float, default=0.0, show_default=True)
@click.option("--max-tokens", type=int, default=512, show_default=True)
@click.option("--max-in-flight", type=int, default=4, show_default=True)
@click.option("--completions/--chat", "use_prompt", default=False, help="Send a raw prompt body instead of chat messages.")
def extract(
    dataset_path: str,
    out_path: str,
    endpoint_url: str,
    model: str,
    prompt_dialect: str,
    kind: str,
    annotator_id: str,
    temperature: float,
    max_tokens: int,
    max_in_flight: int,
    use_prompt: bool,
) -> None:
    """Annotate every passage in a dataset through a completion endpoint."""
    dataset = load_dataset(dataset_path)
    dialect = Dialect.BRACKET_INST if prompt_dialect == "bracket-inst" else Dialect.HEADER_TAGGED
    kind_map = {
        "instruction": PromptKind.INSTRUCTION_TUNED,
        "zero-shot": PromptKind.ZERO_SHOT_TAGGED,
        "three-shot": PromptKind.THREE_SHOT,
    }
    template_kind = kind_map[kind]
    if template_kind is PromptKind.THREE_SHOT:
        raise click.UsageError("three-shot extraction needs exemplars; use the API directly")
    template = PromptTemplate(kind=template_kind, dialect=dialect)
    client = CompletionClient(
        EndpointConfig(
            url=endpoint_url,
            model=model,
            temperature=temperature,
            max_tokens=max_tokens,
            use_chat=not use_prompt,
            max_in_flight=max_in_flight,
        )
    )
    annotations = list(dataset.annotations)
    n_edges = 0
    for pid in sorted(dataset.passages):
        annotation, report = extract_with_report(
            client,
            template,
            dataset.passages[pid],
            annotator_id=annotator_id,
            origin=Origin.MODEL_FEW_SHOT,
        )
        annotations.append(annotation)
        n_edges += len(annotation.edges)
        for position, message in report.diagnostics:
            click.echo(f"{pid}: diagnostic at {position}: {message}", err=True)
    save_dataset(out_path, dataset.passages, annotations)
    click.echo(f"annotated {len(dataset.passages)} passages ({n_edges} edges) -> {out_path}")


@cli.command("parse")
@click.option("--in", "in_path", type=click.Path(exists=True), required=True)
@click.option(
    "--grammar", type=click.Choice(["inline", "tagged"]), default="inline", show_default=True
)
@click.option("--strict", is_flag=True, default=False)
def parse_cmd(in_path: str, grammar: str, strict: bool) -> None:
    """Parse raw LLM output into edges; emits CSV on stdout."""
    from .extraction import parse_inline_triplets, parse_tagged_triplets

    raw = Path(in_path).read_text(encoding="utf-8")
    parser = parse_inline_triplets if grammar == "inline" else parse_tagged_triplets
    report = parser(raw, ParseMode.STRICT if strict else ParseMode.LENIENT)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(("source", "target", "direction"))
    for edge in report.edges:
        writer.writerow((edge.source, edge.target, edge.direction.value))
    for position, message in report.diagnostics:
        click.echo(f"diagnostic at {position}: {message}", err=True)


def _metric_config_from_flags(
    measure: str, threshold: float, no_partial_positives: bool, external_url: str | None
):
    return pipeline.metric_config(
        MeasureSetting(measure, threshold, partial_positives=not no_partial_positives),
        external_url=external_url,
    )


@cli.command()
@click.option("--measure", type=click.Choice(_MEASURES), required=True)
@click.option("--threshold", type=float, required=True)
@click.option("--no-partial-positives", is_flag=True, default=False)
@click.option("--gold", "gold_path", type=click.Path(exists=True), required=True)
@click.option("--pred", "pred_path", type=click.Path(exists=True), required=True)
@click.option("--external-url", default=None, help="Scorer URL for --measure external.")
@click.option("--out", "out_path", type=click.Path(), default=None)
def score(
    measure: str,
    threshold: float,
    no_partial_positives: bool,
    gold_path: str,
    pred_path: str,
    external_url: str | None,
    out_path: str | None,
) -> None:
    """Classify predicted against gold edges per passage; CSV of counts and scores."""
    config = _metric_config_from_flags(measure, threshold, no_partial_positives, external_url)
    rows = pipeline.score_rows(load_dataset(gold_path), load_dataset(pred_path), config)
    table = ResultTable(
        name="scores",
        header=("passage_id", "tp", "pp", "fp", "fn", "score"),
        rows=tuple(rows),
    )
    _echo_table(table, Path(out_path) if out_path else None)


@cli.command()
@click.option("--judgments", "judgments_path", type=click.Path(exists=True), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--annotations", "dataset_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(), default=None)
def elo(
    judgments_path: str, config_path: str | None, dataset_path: str, out_path: str | None
) -> None:
    """Per-passage Elo leaderboards from a judgment log."""
    run_config = load_config(config_path) if config_path else RunConfig()
    dataset = load_dataset(dataset_path)
    log = JudgmentLog(judgments_path)
    boards = pipeline.leaderboards(
        dataset, log.judgments(), pipeline.tournament_config(run_config)
    )
    _echo_table(pipeline.leaderboard_table(boards), Path(out_path) if out_path else None)


@cli.command()
@click.option("--dataset", "dataset_path", type=click.Path(exists=True), required=True)
@click.option("--raters", required=True, help="Comma-separated rater ids.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--overlap", type=float, default=0.2, show_default=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
def schedule(dataset_path: str, raters: str, seed: int, overlap: float, out_path: str) -> None:
    """Assign annotation pairs to raters (self-rating excluded, seeded)."""
    dataset = load_dataset(dataset_path)
    by_passage = {
        pid: [(a.annotation_id, a.annotator_id) for a in dataset.annotations_for(pid)]
        for pid in sorted(dataset.passages)
        if len(dataset.annotations_for(pid)) >= 2
    }
    plan = build_pairings(
        by_passage,
        [r.strip() for r in raters.split(",") if r.strip()],
        seed=seed,
        overlap_fraction=overlap,
    )
    save_schedule(out_path, plan.assignments)
    click.echo(f"scheduled {len(plan.assignments)} assignments -> {out_path}")
    for pid, a, b in plan.skipped_overlaps:
        click.echo(f"overlap skipped for ({a}, {b}) in {pid}: no second eligible rater", err=True)


@cli.command()
@click.option("--workspace", "workspace_path", type=click.Path(exists=True), default=None)
@click.option("--port", type=int, default=8008, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.pass_context
def serve(ctx: click.Context, workspace_path: str | None, port: int, host: str) -> None:
    """Serve the judgment-collection API (and the rater UI against it)."""
    import uvicorn

    from .service import create_app

    ws = Workspace(Path(workspace_path)) if workspace_path else _workspace(ctx)
    app = create_app(ws)
    uvicorn.run(app, host=host, port=port, log_level="warning")


@cli.command()
@click.option("--measure", type=click.Choice(_MEASURES), required=True)
@click.option("--threshold", type=float, required=True)
@click.option("--no-partial-positives", is_flag=True, default=False)
@click.option("--judgments", "judgments_path", type=click.Path(exists=True), required=True)
@click.option("--annotations", "dataset_path", type=click.Path(exists=True), required=True)
@click.option("--include-gold", is_flag=True, default=False)
@click.option("--bootstrap", is_flag=True, default=False, help="Bootstrap CIs instead of Student-t.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--external-url", default=None)
@click.option("--out", "out_path", type=click.Path(), default=None)
def correlate(
    measure: str,
    threshold: float,
    no_partial_positives: bool,
    judgments_path: str,
    dataset_path: str,
    include_gold: bool,
    bootstrap: bool,
    seed: int,
    external_url: str | None,
    out_path: str | None,
) -> None:
    """Correlate a measure's rankings with the human (Elo) rankings."""
    dataset = load_dataset(dataset_path)
    log = JudgmentLog(judgments_path)
    boards = pipeline.leaderboards(
        dataset, log.judgments(), pipeline.tournament_config(RunConfig())
    )
    evals = pipeline.passage_evals(dataset, boards, include_gold=include_gold)
    config = _metric_config_from_flags(measure, threshold, no_partial_positives, external_url)
    summary = pipeline.correlation_for(
        evals, config, method="bootstrap" if bootstrap else "t", seed=seed
    )
    table = ResultTable(
        name="correlation",
        header=pipeline.SUMMARY_HEADER,
        rows=(pipeline.summary_row(measure, threshold, summary),),
    )
    _echo_table(table, Path(out_path) if out_path else None)


@cli.command()
@click.option("--measure", type=click.Choice(_MEASURES), required=True)
@click.option("--grid", required=True, help="lo:hi:step, e.g. 0:1:0.05")
@click.option("--no-partial-positives", is_flag=True, default=False)
@click.option("--judgments", "judgments_path", type=click.Path(exists=True), required=True)
@click.option("--annotations", "dataset_path", type=click.Path(exists=True), required=True)
@click.option("--include-gold", is_flag=True, default=False)
@click.option("--external-url", default=None)
@click.option("--curve-out", type=click.Path(), default=None)
def tune(
    measure: str,
    grid: str,
    no_partial_positives: bool,
    judgments_path: str,
    dataset_path: str,
    include_gold: bool,
    external_url: str | None,
    curve_out: str | None,
) -> None:
    """Grid-search the threshold maximizing mean Spearman correlation."""
    try:
        lo, hi, step = (float(part) for part in grid.split(":"))
    except ValueError:
        raise click.UsageError(f"--grid must be lo:hi:step, got {grid!r}")
    dataset = load_dataset(dataset_path)
    log = JudgmentLog(judgments_path)
    boards = pipeline.leaderboards(
        dataset, log.judgments(), pipeline.tournament_config(RunConfig())
    )
    evals = pipeline.passage_evals(dataset, boards, include_gold=include_gold)
    config = _metric_config_from_flags(measure, lo, no_partial_positives, external_url)
    result = pipeline.tune_threshold(evals, config, lo=lo, hi=hi, step=step)
    rho = "nan" if result.mean_rho is None else format_float(result.mean_rho)
    click.echo(f"threshold={format_float(result.threshold)} mean_rho={rho}")
    curve = pipeline.curve_table(result)
    if curve_out:
        _echo_table(curve, Path(curve_out))
    else:
        _echo_table(curve, None)


@cli.command()
@click.option("--seed", type=int, default=None, help="Overrides the workspace config seed.")
@click.pass_context
def report(ctx: click.Context, seed: int | None) -> None:
    """Regenerate all result files for the workspace; byte-stable."""
    ws = _workspace(ctx)
    run_config = load_config(ws.config_file)
    dataset = ws.load_dataset()
    log = ws.judgment_log()
    tables = pipeline.report_tables(dataset, log.judgments(), run_config)
    manifest = export_results(
        tables,
        ws.results_dir,
        config=run_config.to_json(),
        seed=seed if seed is not None else run_config.seed,
    )
    click.echo(json.dumps(manifest, sort_keys=True, indent=2))


@cli.command("init")
@click.pass_context
def init_workspace(ctx: click.Context) -> None:
    """Create the workspace skeleton with a default config."""
    ws = Workspace.create(Path(ctx.obj["workspace"]))
    if not ws.config_file.exists():
        save_config(ws.config_file, RunConfig())
    click.echo(f"workspace ready at {ws.root}")


def main() -> None:
    try:
        cli(standalone_mode=False)
    except click.exceptions.Abort:
        sys.exit(130)
    except click.UsageError as exc:
        exc.show()
        sys.exit(2)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except FcmEvalError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
