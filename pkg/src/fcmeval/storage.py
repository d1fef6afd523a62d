"""Durable persistence: line-delimited dataset and judgment files, CSV export.

All logs are append-only JSONL so interrupted runs never corrupt earlier
records and readers can stream a consistent prefix. Exports are
byte-deterministic: stable column order, fixed 6-decimal formatting, UTF-8,
LF line endings.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .elo import Judgment, Outcome, PairAssignment
from .errors import (
    FcmEvalError,
    SchemaMismatch,
    SelfRating,
    StorageError,
    ValidationError,
)
from .model import (
    Annotation,
    CausalEdge,
    Origin,
    Passage,
    Split,
    build_annotation,
    canonicalize_direction,
)
from .util import format_float, sha256_of

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Dataset:
    passages: Mapping[str, Passage]
    annotations: tuple[Annotation, ...]

    def annotations_for(self, passage_id: str) -> list[Annotation]:
        return [a for a in self.annotations if a.passage_id == passage_id]

    def by_annotation_id(self) -> dict[str, Annotation]:
        return {a.annotation_id: a for a in self.annotations}


def _edge_to_json(edge: CausalEdge) -> dict:
    payload = {"source": edge.source, "target": edge.target, "direction": edge.direction.value}
    if edge.weight is not None:
        payload["weight"] = edge.weight
    return payload


def _edge_from_json(raw: dict) -> CausalEdge:
    weight = raw.get("weight")
    return CausalEdge(
        source=raw["source"],
        target=raw["target"],
        direction=canonicalize_direction(raw["direction"]),
        weight=float(weight) if weight is not None else None,
    )


def _check_header(raw: dict, line_no: int) -> bool:
    """True when the record is a schema header; raises on version mismatch."""
    if set(raw) == {"schema_version"}:
        if raw["schema_version"] != SCHEMA_VERSION:
            raise SchemaMismatch(
                f"dataset schema {raw['schema_version']} unsupported "
                f"(expected {SCHEMA_VERSION})"
            )
        if line_no != 1:
            raise ValidationError(line_no, "schema header must be the first record")
        return True
    return False


def load_dataset(path: str | Path) -> Dataset:
    """Read a dataset file; every record is validated, errors carry line numbers."""
    path = Path(path)
    if not path.exists():
        raise StorageError(f"dataset file not found: {path}")
    passages: dict[str, Passage] = {}
    pending: list[tuple[int, dict]] = []
    with path.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValidationError(line_no, f"invalid JSON: {exc}") from exc
            if _check_header(raw, line_no):
                continue
            try:
                passage = Passage(
                    passage_id=raw["passage_id"],
                    text=raw["text"],
                    provenance=raw.get("provenance", ""),
                    split=Split(raw.get("split", "unassigned")),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValidationError(line_no, f"bad passage record: {exc}") from exc
            if passage.passage_id in passages:
                raise ValidationError(line_no, f"duplicate passage_id {passage.passage_id!r}")
            passages[passage.passage_id] = passage
            pending.append((line_no, raw))

    annotations: list[Annotation] = []
    for line_no, raw in pending:
        for entry in raw.get("annotations", []):
            try:
                edges = [_edge_from_json(e) for e in entry.get("edges", [])]
                annotations.append(
                    build_annotation(
                        passage_id=raw["passage_id"],
                        annotator_id=entry["annotator_id"],
                        edges=edges,
                        origin=Origin(entry.get("origin", "human")),
                        known_passages=passages,
                    )
                )
            except FcmEvalError as exc:
                raise ValidationError(line_no, str(exc)) from exc
            except (KeyError, TypeError, ValueError) as exc:
                raise ValidationError(line_no, f"bad annotation record: {exc}") from exc
    return Dataset(passages=passages, annotations=tuple(annotations))


def save_dataset(
    path: str | Path,
    passages: Mapping[str, Passage],
    annotations: Sequence[Annotation],
) -> None:
    path = Path(path)
    by_passage: dict[str, list[Annotation]] = {}
    for annotation in annotations:
        by_passage.setdefault(annotation.passage_id, []).append(annotation)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(json.dumps({"schema_version": SCHEMA_VERSION}) + "\n")
            for pid in sorted(passages):
                passage = passages[pid]
                record = {
                    "passage_id": passage.passage_id,
                    "text": passage.text,
                    "provenance": passage.provenance,
                    "split": passage.split.value,
                    "annotations": [
                        {
                            "annotator_id": a.annotator_id,
                            "origin": a.origin.value,
                            "edges": [_edge_to_json(e) for e in a.edges],
                        }
                        for a in by_passage.get(pid, [])
                    ],
                }
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    except OSError as exc:
        raise StorageError(f"cannot write dataset {path}: {exc}") from exc


def _judgment_to_json(judgment: Judgment) -> dict:
    return {
        "judgment_id": judgment.judgment_id,
        "passage_id": judgment.passage_id,
        "annotation_a": judgment.annotation_a,
        "annotation_b": judgment.annotation_b,
        "outcome": judgment.outcome.value,
        "rater_id": judgment.rater_id,
        "submitted_at": judgment.submitted_at,
    }


def _judgment_from_json(raw: dict, line_no: int) -> Judgment:
    try:
        return Judgment(
            judgment_id=raw["judgment_id"],
            passage_id=raw["passage_id"],
            annotation_a=raw["annotation_a"],
            annotation_b=raw["annotation_b"],
            outcome=Outcome(raw["outcome"]),
            rater_id=raw["rater_id"],
            submitted_at=raw.get("submitted_at", ""),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(line_no, f"bad judgment record: {exc}") from exc


class JudgmentLog:
    """Append-only judgment store; records are never rewritten.

    Appends are idempotent on judgment_id: re-submitting a known id is
    acknowledged as a duplicate and leaves the file untouched.
    """

    def __init__(self, path: str | Path, *, annotators: Optional[Mapping[str, str]] = None):
        self.path = Path(path)
        self._annotators = annotators
        self._ids: set[str] = set()
        self._judgments: list[Judgment] = []
        if self.path.exists():
            self._replay()

    def _replay(self) -> None:
        with self.path.open("r", encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    raw = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValidationError(line_no, f"invalid JSON: {exc}") from exc
                judgment = _judgment_from_json(raw, line_no)
                if judgment.judgment_id not in self._ids:
                    self._ids.add(judgment.judgment_id)
                    self._judgments.append(judgment)

    def append(self, judgment: Judgment) -> str:
        """Durably append; returns "new" or "duplicate"."""
        if self._annotators is not None:
            for aid in (judgment.annotation_a, judgment.annotation_b):
                if self._annotators.get(aid) == judgment.rater_id:
                    raise SelfRating(
                        f"rater {judgment.rater_id!r} cannot judge own annotation {aid!r}"
                    )
        if judgment.judgment_id in self._ids:
            return "duplicate"
        try:
            with self.path.open("a", encoding="utf-8", newline="\n") as handle:
                handle.write(json.dumps(_judgment_to_json(judgment), ensure_ascii=False) + "\n")
                handle.flush()
                os.fsync(handle.fileno())
        except OSError as exc:
            raise StorageError(f"cannot append to judgment log {self.path}: {exc}") from exc
        self._ids.add(judgment.judgment_id)
        self._judgments.append(judgment)
        return "new"

    def __contains__(self, judgment_id: str) -> bool:
        return judgment_id in self._ids

    def judgments(self) -> list[Judgment]:
        """All records in append order."""
        return list(self._judgments)

    def for_passage(self, passage_id: str) -> list[Judgment]:
        return [j for j in self._judgments if j.passage_id == passage_id]


def save_schedule(path: str | Path, assignments: Sequence[PairAssignment]) -> None:
    try:
        with Path(path).open("w", encoding="utf-8", newline="\n") as handle:
            for i, a in enumerate(assignments):
                record = {
                    "assignment_id": f"a{i:05d}",
                    "passage_id": a.passage_id,
                    "left": a.left,
                    "right": a.right,
                    "rater_id": a.rater_id,
                    "is_overlap": a.is_overlap,
                }
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    except OSError as exc:
        raise StorageError(f"cannot write schedule {path}: {exc}") from exc


def load_schedule(path: str | Path) -> list[tuple[str, PairAssignment]]:
    """(assignment_id, assignment) pairs in file order."""
    out = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
                out.append(
                    (
                        raw["assignment_id"],
                        PairAssignment(
                            passage_id=raw["passage_id"],
                            left=raw["left"],
                            right=raw["right"],
                            rater_id=raw["rater_id"],
                            is_overlap=bool(raw.get("is_overlap", False)),
                        ),
                    )
                )
            except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
                raise ValidationError(line_no, f"bad schedule record: {exc}") from exc
    return out


@dataclass(frozen=True)
class ResultTable:
    """One CSV artifact: a name, a header, and pre-ordered rows."""

    name: str
    header: tuple[str, ...]
    rows: tuple[tuple, ...]


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def render_csv(table: ResultTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([_format_cell(cell) for cell in row])
    return buffer.getvalue()


def export_results(
    tables: Sequence[ResultTable],
    directory: str | Path,
    *,
    config: Mapping,
    seed: Optional[int],
) -> dict:
    """Write CSVs plus a manifest with the config hash and seed.

    Re-exporting identical inputs produces byte-identical files.
    """
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise StorageError(f"cannot create results directory {directory}: {exc}") from exc
    manifest: dict = {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "config_sha256": sha256_of(dict(config)),
        "files": {},
    }
    try:
        for table in tables:
            content = render_csv(table)
            target = directory / f"{table.name}.csv"
            target.write_text(content, encoding="utf-8", newline="\n")
            manifest["files"][f"{table.name}.csv"] = sha256_of(content)
        manifest_path = directory / "manifest.json"
        manifest_path.write_text(
            json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise StorageError(f"cannot write results under {directory}: {exc}") from exc
    return manifest


@dataclass(frozen=True)
class Workspace:
    """Standard file layout rooted at one directory."""

    root: Path
    dataset_file: Path = field(init=False)
    judgment_file: Path = field(init=False)
    config_file: Path = field(init=False)
    schedule_file: Path = field(init=False)
    results_dir: Path = field(init=False)

    def __post_init__(self) -> None:
        root = Path(self.root)
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "dataset_file", root / "dataset.jsonl")
        object.__setattr__(self, "judgment_file", root / "judgments.jsonl")
        object.__setattr__(self, "config_file", root / "config.json")
        object.__setattr__(self, "schedule_file", root / "schedule.jsonl")
        object.__setattr__(self, "results_dir", root / "results")

    @classmethod
    def create(cls, root: str | Path) -> "Workspace":
        ws = cls(Path(root))
        ws.root.mkdir(parents=True, exist_ok=True)
        ws.results_dir.mkdir(exist_ok=True)
        return ws

    def load_dataset(self) -> Dataset:
        return load_dataset(self.dataset_file)

    def judgment_log(self, *, annotators: Optional[Mapping[str, str]] = None) -> JudgmentLog:
        return JudgmentLog(self.judgment_file, annotators=annotators)
