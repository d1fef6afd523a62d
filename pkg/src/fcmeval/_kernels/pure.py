"""Pure-Python similarity kernels.

These are the reference implementations of the hot inner loops; the
compiled extension in _ckernels.pyx mirrors them exactly. Both operate on
integer token ids so the string handling stays outside the kernel. Keep
the two backends in lockstep: the parity tests compare them directly.
"""

from __future__ import annotations

from collections import Counter
from math import exp, log
from typing import Sequence

# Reference sequences longer than this fall back to the greedy aligner;
# the exact chunk-minimizing DP is exponential in the reference length.
ALIGN_DP_LIMIT = 12


def bleu_kernel(cand: Sequence[int], ref: Sequence[int], max_n: int, eps: float) -> float:
    """Geometric mean of clipped n-gram precisions times the brevity penalty.

    n runs from 1 to min(max_n, len(cand)); a zero match count at any order
    is replaced by eps. Empty candidate scores 0.
    """
    c = len(cand)
    if c == 0:
        return 0.0
    r = len(ref)
    top_n = min(max_n, c)
    log_sum = 0.0
    for n in range(1, top_n + 1):
        total = c - n + 1
        cand_grams = Counter(tuple(cand[i : i + n]) for i in range(total))
        ref_grams = Counter(tuple(ref[i : i + n]) for i in range(r - n + 1)) if r >= n else Counter()
        matched = sum(min(count, ref_grams[gram]) for gram, count in cand_grams.items())
        numerator = matched if matched > 0 else eps
        log_sum += log(numerator / total)
    score = exp(log_sum / top_n)
    if c < r:
        score *= exp(1.0 - r / c)
    return score


def rouge1_kernel(cand: Sequence[int], ref: Sequence[int]) -> float:
    """Unigram-overlap F-measure: 2m / (|cand| + |ref|) with clipped m."""
    if not cand and not ref:
        return 1.0
    if not cand or not ref:
        return 0.0
    ref_counts = Counter(ref)
    matched = sum(min(count, ref_counts[tok]) for tok, count in Counter(cand).items())
    if matched == 0:
        return 0.0
    return 2.0 * matched / (len(cand) + len(ref))


def _match_stage(ce: int, cs: int, cy: int, re_: int, rs: int, ry: int) -> int:
    if ce == re_:
        return 1
    if cs >= 0 and cs == rs:
        return 2
    if cy >= 0 and cy == ry:
        return 3
    return 0


def meteor_align(
    cand_exact: Sequence[int],
    cand_stem: Sequence[int],
    cand_syn: Sequence[int],
    ref_exact: Sequence[int],
    ref_stem: Sequence[int],
    ref_syn: Sequence[int],
) -> tuple[int, int]:
    """Staged unigram alignment; returns (match count, chunk count).

    Stage counts are maximized in stage order (exact, then stem, then
    synonym) and, among alignments achieving those counts, the chunk count
    is minimized. A chunk is a run of matches adjacent in both sequences.
    Negative stem/synonym ids never match.
    """
    n_cand, n_ref = len(cand_exact), len(ref_exact)
    if n_cand == 0 or n_ref == 0:
        return (0, 0)
    allowed = [
        [
            _match_stage(
                cand_exact[i], cand_stem[i], cand_syn[i],
                ref_exact[j], ref_stem[j], ref_syn[j],
            )
            for j in range(n_ref)
        ]
        for i in range(n_cand)
    ]
    if n_ref > ALIGN_DP_LIMIT:
        return _greedy_align(allowed, n_cand, n_ref)
    return _dp_align(allowed, n_cand, n_ref)


def _dp_align(allowed: list[list[int]], n_cand: int, n_ref: int) -> tuple[int, int]:
    # State: (used-reference bitmask, reference matched by the previous
    # candidate position; n_ref = previous position unmatched). Value:
    # (stage1, stage2, stage3, -chunks), maximized lexicographically.
    states: dict[tuple[int, int], tuple[int, int, int, int]] = {(0, n_ref): (0, 0, 0, 0)}
    for i in range(n_cand):
        nxt: dict[tuple[int, int], tuple[int, int, int, int]] = {}
        row = allowed[i]
        for (mask, last), value in states.items():
            skip_key = (mask, n_ref)
            if nxt.get(skip_key, (-1,)) < value:
                nxt[skip_key] = value
            for j in range(n_ref):
                stage = row[j]
                if stage == 0 or (mask >> j) & 1:
                    continue
                n1, n2, n3, neg_chunks = value
                if stage == 1:
                    n1 += 1
                elif stage == 2:
                    n2 += 1
                else:
                    n3 += 1
                if last == n_ref or j != last + 1:
                    neg_chunks -= 1
                key = (mask | (1 << j), j)
                candidate = (n1, n2, n3, neg_chunks)
                if nxt.get(key, (-1,)) < candidate:
                    nxt[key] = candidate
        states = nxt
    n1, n2, n3, neg_chunks = max(states.values())
    return (n1 + n2 + n3, -neg_chunks)


def _greedy_align(allowed: list[list[int]], n_cand: int, n_ref: int) -> tuple[int, int]:
    cand_match = [-1] * n_cand
    ref_used = [False] * n_ref
    for stage in (1, 2, 3):
        for i in range(n_cand):
            if cand_match[i] >= 0:
                continue
            row = allowed[i]
            for j in range(n_ref):
                if not ref_used[j] and 0 < row[j] <= stage:
                    cand_match[i] = j
                    ref_used[j] = True
                    break
    matches = [(i, j) for i, j in enumerate(cand_match) if j >= 0]
    if not matches:
        return (0, 0)
    chunks = 1
    for (pi, pj), (ci, cj) in zip(matches, matches[1:]):
        if ci != pi + 1 or cj != pj + 1:
            chunks += 1
    return (len(matches), chunks)
