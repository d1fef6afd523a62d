"""Run configuration shared by the CLI and the judgment service."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .errors import SchemaMismatch, StorageError
from .storage import SCHEMA_VERSION
from .textsim import MeasureConfig, MeasureKind

# Ranked heuristics shown to raters while they pick a winner. Order matters:
# earlier entries win when two guidelines conflict.
DEFAULT_GUIDELINES: tuple[str, ...] = (
    "Prefer the annotation with more good tuples over one with more bad tuples.",
    "Prefer node names that do not introduce concepts absent from the text.",
    "Prefer the source and target in the correct positions.",
    "Do not reward inferred transitive relations (A affects C via B) unless the "
    "text states them explicitly.",
    "Prefer node names that stay as close to the text as possible.",
    "Prefer verbose node names (keep adjectives): downstream steps can always "
    "abstract detail away, but cannot recover it.",
    "Prefer splitting a node at 'and' when it joins two distinct concepts.",
    "Prefer the correct direction of the causal relation.",
)

CONFLICT_RULE = (
    "When guidelines conflict, prefer the one higher on the list; in all cases, "
    "use your best judgment."
)


@dataclass(frozen=True)
class MeasureSetting:
    kind: str
    threshold: float
    partial_positives: bool = True

    def to_measure_config(self, **overrides) -> MeasureConfig:
        return MeasureConfig(kind=MeasureKind(self.kind), **overrides)


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    overlap_fraction: float = 0.2
    k_factor: float = 32.0
    initial_rating: float = 1000.0
    raters: tuple[str, ...] = ()
    guidelines: tuple[str, ...] = DEFAULT_GUIDELINES
    conflict_rule: str = CONFLICT_RULE
    measures: tuple[MeasureSetting, ...] = (
        MeasureSetting("exact", 1.0, partial_positives=False),
        MeasureSetting("bleu", 0.352),
        MeasureSetting("rouge1", 0.45),
        MeasureSetting("meteor", 0.01),
    )
    include_gold_in_rankings: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.overlap_fraction <= 1.0:
            raise ValueError("overlap_fraction must be in [0, 1]")
        if self.k_factor <= 0:
            raise ValueError("k_factor must be positive")

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "seed": self.seed,
            "overlap_fraction": self.overlap_fraction,
            "k_factor": self.k_factor,
            "initial_rating": self.initial_rating,
            "raters": list(self.raters),
            "guidelines": list(self.guidelines),
            "conflict_rule": self.conflict_rule,
            "measures": [
                {
                    "kind": m.kind,
                    "threshold": m.threshold,
                    "partial_positives": m.partial_positives,
                }
                for m in self.measures
            ],
            "include_gold_in_rankings": self.include_gold_in_rankings,
        }

    @classmethod
    def from_json(cls, raw: dict) -> "RunConfig":
        version = raw.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise SchemaMismatch(f"config schema {version} unsupported")
        kwargs = {}
        for key in (
            "seed",
            "overlap_fraction",
            "k_factor",
            "initial_rating",
            "conflict_rule",
            "include_gold_in_rankings",
        ):
            if key in raw:
                kwargs[key] = raw[key]
        if "raters" in raw:
            kwargs["raters"] = tuple(raw["raters"])
        if "guidelines" in raw:
            kwargs["guidelines"] = tuple(raw["guidelines"])
        if "measures" in raw:
            kwargs["measures"] = tuple(
                MeasureSetting(
                    kind=m["kind"],
                    threshold=m["threshold"],
                    partial_positives=m.get("partial_positives", True),
                )
                for m in raw["measures"]
            )
        return cls(**kwargs)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise StorageError(f"config file not found: {path}")
    try:
        return RunConfig.from_json(json.loads(path.read_text(encoding="utf-8")))
    except json.JSONDecodeError as exc:
        raise StorageError(f"config file {path} is not valid JSON: {exc}") from exc


def save_config(path: str | Path, config: RunConfig) -> None:
    Path(path).write_text(
        json.dumps(config.to_json(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
