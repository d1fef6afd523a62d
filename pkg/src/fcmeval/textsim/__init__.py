from .external import ExternalScorerClient
from .measures import (
    Measure,
    MeasureConfig,
    MeasureKind,
    build_measure,
    measure_from_name,
    meteor_alignment,
    sim_bleu,
    sim_exact,
    sim_meteor,
    sim_rouge1,
)
from .tokenizer import TokenSeq, tokenize

__all__ = [
    "ExternalScorerClient",
    "Measure",
    "MeasureConfig",
    "MeasureKind",
    "TokenSeq",
    "build_measure",
    "measure_from_name",
    "meteor_alignment",
    "sim_bleu",
    "sim_exact",
    "sim_meteor",
    "sim_rouge1",
    "tokenize",
]
