"""Per-attribute textual similarity backends.

Every built-in measure returns a value in [0, 1]. The external learned
scorer is pass-through and may return anything, including negative values.
Candidate is always the predicted phrase, reference the gold phrase.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional, Sequence

from .. import _kernels
from . import porter
from .tokenizer import TokenSeq, tokenize

_stem_cache: dict[str, str] = {}


def _stem(token: str) -> str:
    cached = _stem_cache.get(token)
    if cached is None:
        cached = _stem_cache[token] = porter.stem(token)
    return cached


class MeasureKind(str, Enum):
    EXACT = "exact"
    BLEU = "bleu"
    ROUGE1 = "rouge1"
    METEOR = "meteor"
    EXTERNAL = "external"


@dataclass(frozen=True)
class MeasureConfig:
    kind: MeasureKind
    bleu_max_n: int = 4
    bleu_epsilon: float = 1e-9
    meteor_gamma: float = 0.5
    meteor_beta: float = 3.0
    meteor_stemming: bool = True
    # word -> synonym-group label; words sharing a label may align
    synonyms: Optional[Mapping[str, str]] = None
    external_url: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind is MeasureKind.BLEU:
            if self.bleu_max_n < 1:
                raise ValueError("bleu_max_n must be >= 1")
            if self.bleu_epsilon <= 0:
                raise ValueError("bleu_epsilon must be > 0")
        if self.kind is MeasureKind.METEOR and self.meteor_gamma < 0:
            raise ValueError("meteor_gamma must be >= 0")
        if self.kind is MeasureKind.EXTERNAL and not self.external_url:
            raise ValueError("external measure requires external_url")


def sim_exact(candidate: str, reference: str) -> float:
    """1.0 when the whitespace-normalized, case-folded phrases are equal."""
    return 1.0 if " ".join(candidate.lower().split()) == " ".join(reference.lower().split()) else 0.0


def _intern_ids(*seqs: TokenSeq) -> list[list[int]]:
    vocab: dict[str, int] = {}
    out = []
    for seq in seqs:
        ids = []
        for tok in seq:
            idx = vocab.get(tok)
            if idx is None:
                idx = vocab[tok] = len(vocab)
            ids.append(idx)
        out.append(ids)
    return out


def sim_bleu(
    candidate: TokenSeq,
    reference: TokenSeq,
    *,
    max_n: int = 4,
    epsilon: float = 1e-9,
) -> float:
    cand_ids, ref_ids = _intern_ids(candidate, reference)
    return _kernels.bleu_kernel(cand_ids, ref_ids, max_n, epsilon)


def sim_rouge1(candidate: TokenSeq, reference: TokenSeq) -> float:
    cand_ids, ref_ids = _intern_ids(candidate, reference)
    return _kernels.rouge1_kernel(cand_ids, ref_ids)


def meteor_alignment(
    candidate: TokenSeq,
    reference: TokenSeq,
    *,
    stemming: bool = True,
    synonyms: Optional[Mapping[str, str]] = None,
) -> tuple[int, int]:
    """Expose the (match count, chunk count) alignment used by sim_meteor."""
    cand_ids, ref_ids = _intern_ids(candidate, reference)
    if stemming:
        cand_stems, ref_stems = _intern_ids(
            tuple(_stem(t) for t in candidate), tuple(_stem(t) for t in reference)
        )
    else:
        cand_stems = [-1] * len(candidate)
        ref_stems = [-1] * len(reference)

    if synonyms:
        groups: dict[str, int] = {}

        def syn_id(token: str) -> int:
            label = synonyms.get(token)
            if label is None:
                return -1
            idx = groups.get(label)
            if idx is None:
                idx = groups[label] = len(groups)
            return idx

        cand_syn = [syn_id(t) for t in candidate]
        ref_syn = [syn_id(t) for t in reference]
    else:
        cand_syn = [-1] * len(candidate)
        ref_syn = [-1] * len(reference)

    return _kernels.meteor_align(cand_ids, cand_stems, cand_syn, ref_ids, ref_stems, ref_syn)


def sim_meteor(
    candidate: TokenSeq,
    reference: TokenSeq,
    *,
    gamma: float = 0.5,
    beta: float = 3.0,
    stemming: bool = True,
    synonyms: Optional[Mapping[str, str]] = None,
) -> float:
    if not candidate or not reference:
        return 0.0
    matches, chunks = meteor_alignment(
        candidate, reference, stemming=stemming, synonyms=synonyms
    )
    if matches == 0:
        return 0.0
    precision = matches / len(candidate)
    recall = matches / len(reference)
    f_mean = 10.0 * precision * recall / (recall + 9.0 * precision)
    penalty = gamma * (chunks / matches) ** beta
    return f_mean * (1.0 - penalty)


class Measure:
    """Phrase-level scorer with an internal (candidate, reference) cache.

    Built-in kinds are pure; the cache only avoids re-tokenizing identical
    phrase pairs during threshold sweeps. The external kind delegates to an
    injected scorer client whose cache is synchronized.
    """

    def __init__(self, config: MeasureConfig, external_scorer=None):
        if config.kind is MeasureKind.EXTERNAL and external_scorer is None:
            from .external import ExternalScorerClient

            external_scorer = ExternalScorerClient(config.external_url)
        self.config = config
        self.kind = config.kind
        self._external = external_scorer
        self._cache: dict[tuple[str, str], float] = {}
        self._lock = threading.Lock()

    def score(self, candidate: str, reference: str) -> float:
        key = (candidate, reference)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        value = self._score(candidate, reference)
        with self._lock:
            self._cache[key] = value
        return value

    def _score(self, candidate: str, reference: str) -> float:
        kind = self.kind
        if kind is MeasureKind.EXACT:
            return sim_exact(candidate, reference)
        if kind is MeasureKind.EXTERNAL:
            return self._external.score(candidate, reference)
        cand = tokenize(candidate)
        ref = tokenize(reference)
        if kind is MeasureKind.BLEU:
            return sim_bleu(
                cand, ref, max_n=self.config.bleu_max_n, epsilon=self.config.bleu_epsilon
            )
        if kind is MeasureKind.ROUGE1:
            return sim_rouge1(cand, ref)
        if kind is MeasureKind.METEOR:
            return sim_meteor(
                cand,
                ref,
                gamma=self.config.meteor_gamma,
                beta=self.config.meteor_beta,
                stemming=self.config.meteor_stemming,
                synonyms=self.config.synonyms,
            )
        raise ValueError(f"unhandled measure kind: {kind}")


def build_measure(config: MeasureConfig, external_scorer=None) -> Measure:
    return Measure(config, external_scorer=external_scorer)


def measure_from_name(name: str, **overrides) -> Measure:
    """Convenience constructor for CLI use: build_measure by kind name."""
    return build_measure(MeasureConfig(kind=MeasureKind(name), **overrides))
