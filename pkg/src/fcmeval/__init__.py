"""Soft edge-based scoring, Elo tournaments, and measure validation for
causal-map annotations extracted from text."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .model import (
    Annotation,
    CausalEdge,
    Direction,
    Origin,
    Passage,
    Rater,
    Split,
    build_annotation,
    canonicalize_direction,
    normalize_phrase,
)

__version__ = "0.1.0"

__all__ = [
    "Annotation",
    "CausalEdge",
    "Direction",
    "KERNEL_BACKEND",
    "Origin",
    "Passage",
    "Rater",
    "Split",
    "build_annotation",
    "canonicalize_direction",
    "normalize_phrase",
    "__version__",
]
