"""Prompt construction, LLM completion calls, and triplet output parsing.

Two output grammars exist. The inline grammar puts the cause phrase right
after the <triplet> marker and the effect phrase after <subj>:

    <triplet> cause phrase <subj> effect phrase <obj> positive

The tagged grammar wraps each field in open/close tags:

    <triplet> <subj> cause </subj> <obj> effect </obj>
    <relation> Negative </relation> </triplet>

Parsing is lenient by default (model output is noisy: malformed segments
are skipped with diagnostics); strict mode raises on any anomaly and is
meant for human-entered data.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import httpx

from .errors import EmptyPhrase, EndpointError, ParseFailure, UnrecognizedDirection
from .model import (
    Annotation,
    CausalEdge,
    Direction,
    Origin,
    Passage,
    build_annotation,
    canonicalize_direction,
)

logger = logging.getLogger(__name__)


class PromptKind(Enum):
    INSTRUCTION_TUNED = "instruction_tuned"
    ZERO_SHOT_TAGGED = "zero_shot_tagged"
    THREE_SHOT = "three_shot"


class Dialect(Enum):
    BRACKET_INST = "bracket_inst"
    HEADER_TAGGED = "header_tagged"


class ParseMode(Enum):
    STRICT = "strict"
    LENIENT = "lenient"


@dataclass(frozen=True)
class ParseReport:
    edges: tuple[CausalEdge, ...]
    diagnostics: tuple[tuple[int, str], ...]
    mode: ParseMode


@dataclass(frozen=True)
class PromptTemplate:
    kind: PromptKind
    dialect: Dialect
    exemplars: tuple[tuple[str, tuple[CausalEdge, ...]], ...] = ()

    def __post_init__(self) -> None:
        if self.kind is PromptKind.THREE_SHOT:
            if len(self.exemplars) != 3:
                raise ValueError("three-shot templates require exactly 3 exemplars")
        elif self.exemplars:
            raise ValueError(f"{self.kind.value} templates take no exemplars")


INLINE_INSTRUCTION = (
    "Read the input sentence and extract every causal relationship it expresses "
    "as a triplet of two entities and a relationship. Both entities must be "
    "phrases taken from the sentence, and the relationship must be either "
    "'Positive' or 'Negative'. Begin each triplet with the <triplet> token, "
    "then write the cause phrase, the <subj> token, the effect phrase, the "
    "<obj> token, and finally the relationship."
)

TAGGED_FORMAT_BLOCK = (
    "<triplet>\n"
    "    <subj> </subj>\n"
    "    <obj> </obj>\n"
    "    <relation> </relation>\n"
    "</triplet>"
)

TAGGED_INSTRUCTION = (
    "Read the input sentence and extract every (subject, object, causal "
    "relation) triplet. The subject and object must be phrases from the input "
    "sentence, and the relation must be strictly either \"Positive\" or "
    "\"Negative\" and nothing else. Wrap each triplet in <triplet> and "
    "</triplet> tokens, the subject in <subj> and </subj>, the object in <obj> "
    "and </obj>, and the relation in <relation> and </relation>. Each triplet "
    "must follow this format exactly:\n\n" + TAGGED_FORMAT_BLOCK
)

_DIRECTION_WORDS = {Direction.INCREASE: "positive", Direction.DECREASE: "negative"}

# End-of-sequence markers stripped before parsing; models leak these into
# replies and the stop condition is not under our control.
_EOS_TOKENS = ("</s>", "<s>", "<|eot_id|>", "<|end_of_text|>", "<|begin_of_text|>")


def serialize_inline_triplets(edges: Sequence[CausalEdge]) -> str:
    """Render edges in the inline grammar (the exact parser round-trip)."""
    return "\n".join(
        f"<triplet> {e.source} <subj> {e.target} <obj> {_DIRECTION_WORDS[e.direction]}"
        for e in edges
    )


def _exemplar_block(text: str, edges: Sequence[CausalEdge]) -> str:
    return f"Causal Relation Triplets : {serialize_inline_triplets(edges)}"


def build_prompt(template: PromptTemplate, passage: Passage) -> str:
    """Emit the full prompt for the template's dialect; byte-stable."""
    text = passage.text
    if template.dialect is Dialect.BRACKET_INST:
        if template.kind is PromptKind.INSTRUCTION_TUNED:
            return f"<s>[INST] {INLINE_INSTRUCTION}\n\nInput Sentence: {text} [/INST]"
        if template.kind is PromptKind.ZERO_SHOT_TAGGED:
            return (
                f"<s>[INST] <<SYS>> {TAGGED_INSTRUCTION}\n<</SYS>>\n"
                f"Input Sentence : {text} [/INST]\n"
                "Causal Relation Triplet : \n"
            )
        parts = [f"<s>[INST] <<SYS>> {INLINE_INSTRUCTION}\nDon't add extra sentences.\n<</SYS>>"]
        for i, (ex_text, ex_edges) in enumerate(template.exemplars):
            lead = "" if i == 0 else "[INST]\n"
            parts.append(
                f"{lead}Input Sentence : {ex_text} [/INST]\n"
                f"{_exemplar_block(ex_text, ex_edges)}\n</s>"
            )
        parts.append(f"[INST]\nInput Sentence : {text} [/INST]\nCausal Relation Triplets : ")
        return "\n".join(parts)

    # header-tagged dialect
    instruction = (
        TAGGED_INSTRUCTION
        if template.kind is PromptKind.ZERO_SHOT_TAGGED
        else INLINE_INSTRUCTION
    )
    header = (
        "<|begin_of_text|><|start_header_id|> system<|end_header_id|>\n\n"
        f"{instruction} <|eot_id|>"
    )
    if template.kind is PromptKind.THREE_SHOT:
        turns = []
        for ex_text, ex_edges in template.exemplars:
            turns.append(
                "<|start_header_id|> user<|end_header_id|>\n\n"
                f"Input Sentence : {ex_text} <|eot_id|>"
                "<|start_header_id|> assistant<|end_header_id|>\n\n"
                f"{_exemplar_block(ex_text, ex_edges)} <|eot_id|>"
            )
        body = "".join(turns)
    else:
        body = ""
    return (
        header
        + body
        + "<|start_header_id|> user<|end_header_id|>\n\n"
        + f"Input Sentence : {text} <|eot_id|>"
        + "<|start_header_id|> assistant<|end_header_id|>\n\n"
    )


def _strip_eos(raw: str) -> str:
    for token in _EOS_TOKENS:
        raw = raw.replace(token, "")
    return raw


def _clean_direction_token(token: str) -> str:
    return token.strip().rstrip(".,;:!")


def _finish(
    edges: list[CausalEdge], diagnostics: list[tuple[int, str]], mode: ParseMode
) -> ParseReport:
    if mode is ParseMode.STRICT and diagnostics:
        raise ParseFailure(diagnostics)
    return ParseReport(edges=tuple(edges), diagnostics=tuple(diagnostics), mode=mode)


def parse_inline_triplets(raw: str, mode: ParseMode = ParseMode.LENIENT) -> ParseReport:
    """Parse the inline grammar; text before the first <triplet> is ignored."""
    cleaned = _strip_eos(raw)
    edges: list[CausalEdge] = []
    diagnostics: list[tuple[int, str]] = []

    marker = "<triplet>"
    starts = []
    pos = cleaned.find(marker)
    while pos >= 0:
        starts.append(pos)
        pos = cleaned.find(marker, pos + len(marker))

    for idx, start in enumerate(starts):
        seg_start = start + len(marker)
        seg_end = starts[idx + 1] if idx + 1 < len(starts) else len(cleaned)
        segment = cleaned[seg_start:seg_end]

        subj_at = segment.find("<subj>")
        if subj_at < 0:
            diagnostics.append((start, "segment is missing the <subj> marker"))
            continue
        obj_at = segment.find("<obj>", subj_at + len("<subj>"))
        if obj_at < 0:
            diagnostics.append((start, "segment is missing the <obj> marker"))
            continue

        source_raw = segment[:subj_at]
        target_raw = segment[subj_at + len("<subj>") : obj_at]
        tail = segment[obj_at + len("<obj>") :]
        tail_tokens = tail.split()
        if not tail_tokens:
            diagnostics.append((start, "segment has no direction token"))
            continue
        if len(tail_tokens) > 1 and mode is ParseMode.STRICT:
            diagnostics.append((start, f"unexpected text after direction: {tail_tokens[1:]!r}"))
            continue
        try:
            edges.append(
                CausalEdge(
                    source=source_raw,
                    target=target_raw,
                    direction=canonicalize_direction(_clean_direction_token(tail_tokens[0])),
                )
            )
        except (EmptyPhrase, UnrecognizedDirection) as exc:
            diagnostics.append((start, str(exc)))
    return _finish(edges, diagnostics, mode)


_TAGGED_FIELDS = ("subj", "obj", "relation")


def _extract_field(
    body: str, tag: str, mode: ParseMode
) -> tuple[Optional[str], Optional[str]]:
    """(content, problem); missing close-tags are tolerated in lenient mode."""
    open_tag, close_tag = f"<{tag}>", f"</{tag}>"
    at = body.find(open_tag)
    if at < 0:
        return None, f"block is missing {open_tag}"
    content_start = at + len(open_tag)
    end = body.find(close_tag, content_start)
    if end >= 0:
        return body[content_start:end], None
    if mode is ParseMode.STRICT:
        return None, f"block is missing {close_tag}"
    # run to the next known open tag, or the end of the block
    cut = len(body)
    for other in _TAGGED_FIELDS:
        if other == tag:
            continue
        other_at = body.find(f"<{other}>", content_start)
        if 0 <= other_at < cut:
            cut = other_at
    return body[content_start:cut], None


def parse_tagged_triplets(raw: str, mode: ParseMode = ParseMode.LENIENT) -> ParseReport:
    """Parse <triplet>...</triplet> blocks with tagged subj/obj/relation fields."""
    cleaned = _strip_eos(raw)
    edges: list[CausalEdge] = []
    diagnostics: list[tuple[int, str]] = []

    open_tag, close_tag = "<triplet>", "</triplet>"
    pos = 0
    while True:
        start = cleaned.find(open_tag, pos)
        if start < 0:
            break
        body_start = start + len(open_tag)
        next_open = cleaned.find(open_tag, body_start)
        end = cleaned.find(close_tag, body_start)
        if end >= 0 and (next_open < 0 or end < next_open):
            body = cleaned[body_start:end]
            pos = end + len(close_tag)
        else:
            if mode is ParseMode.STRICT:
                diagnostics.append((start, "block is missing </triplet>"))
                pos = next_open if next_open >= 0 else len(cleaned)
                continue
            stop = next_open if next_open >= 0 else len(cleaned)
            body = cleaned[body_start:stop]
            pos = stop

        fields: dict[str, str] = {}
        problem = None
        for tag in _TAGGED_FIELDS:
            content, problem = _extract_field(body, tag, mode)
            if problem is not None:
                break
            fields[tag] = content
        if problem is not None:
            diagnostics.append((start, problem))
            continue
        try:
            edges.append(
                CausalEdge(
                    source=fields["subj"],
                    target=fields["obj"],
                    direction=canonicalize_direction(
                        _clean_direction_token(fields["relation"])
                    ),
                )
            )
        except (EmptyPhrase, UnrecognizedDirection) as exc:
            diagnostics.append((start, str(exc)))
    return _finish(edges, diagnostics, mode)


def parser_for(kind: PromptKind):
    return parse_tagged_triplets if kind is PromptKind.ZERO_SHOT_TAGGED else parse_inline_triplets


@dataclass(frozen=True)
class EndpointConfig:
    """Generic chat-completion endpoint; no provider-specific logic."""

    url: str
    model: str
    temperature: float = 0.0
    max_tokens: int = 512
    use_chat: bool = True
    timeout: float = 60.0
    max_in_flight: int = 4
    extra_headers: tuple[tuple[str, str], ...] = field(default_factory=tuple)


class CompletionClient:
    """Blocking completion client with a bounded in-flight request count."""

    def __init__(self, config: EndpointConfig, http: Optional[httpx.Client] = None):
        self.config = config
        self._http = http or httpx.Client(timeout=config.timeout)
        self._slots = threading.BoundedSemaphore(config.max_in_flight)

    def complete(self, prompt: str) -> str:
        body: dict = {
            "model": self.config.model,
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        }
        if self.config.use_chat:
            body["messages"] = [{"role": "user", "content": prompt}]
        else:
            body["prompt"] = prompt
        try:
            with self._slots:
                response = self._http.post(
                    self.config.url, json=body, headers=dict(self.config.extra_headers)
                )
            response.raise_for_status()
            data = response.json()
        except (httpx.HTTPError, ValueError) as exc:
            raise EndpointError(f"completion request failed: {exc}") from exc
        try:
            first = data["choices"][0]
        except (KeyError, IndexError, TypeError) as exc:
            raise EndpointError(f"completion reply has no choices: {data!r}") from exc
        text = None
        if isinstance(first, dict):
            message = first.get("message")
            if isinstance(message, dict):
                text = message.get("content")
            if text is None:
                text = first.get("text")
        if not isinstance(text, str):
            raise EndpointError(f"completion reply carries no text: {first!r}")
        return text


def extract_with_report(
    client: CompletionClient,
    template: PromptTemplate,
    passage: Passage,
    *,
    annotator_id: str = "model",
    origin: Origin = Origin.MODEL_FEW_SHOT,
    mode: ParseMode = ParseMode.LENIENT,
) -> tuple[Annotation, ParseReport]:
    """One completion round-trip: prompt, request, parse, assemble."""
    prompt = build_prompt(template, passage)
    reply = client.complete(prompt)
    report = parser_for(template.kind)(reply, mode)
    if not reply.strip():
        report = ParseReport(
            edges=report.edges,
            diagnostics=report.diagnostics + ((0, "endpoint returned an empty completion"),),
            mode=report.mode,
        )
    for position, message in report.diagnostics:
        logger.warning("passage %s: parse diagnostic at %d: %s", passage.passage_id, position, message)
    annotation = build_annotation(
        passage_id=passage.passage_id,
        annotator_id=annotator_id,
        edges=report.edges,
        origin=origin,
    )
    return annotation, report


def extract_annotation(
    client: CompletionClient,
    template: PromptTemplate,
    passage: Passage,
    *,
    annotator_id: str = "model",
    origin: Origin = Origin.MODEL_FEW_SHOT,
    mode: ParseMode = ParseMode.LENIENT,
) -> Annotation:
    annotation, _ = extract_with_report(
        client, template, passage, annotator_id=annotator_id, origin=origin, mode=mode
    )
    return annotation
