"""Synthetic constructions with hand-derived similarity values.

Sources are built from disjoint token blocks so that only the engineered
pairs have nonzero overlap; unigram-F similarity between two 5-token
phrases sharing m tokens is exactly m/5.
"""

from __future__ import annotations

from fcmeval.analysis import PassageEval, Ranking
from fcmeval.elo import Judgment, Outcome
from fcmeval.model import Annotation, Direction, Origin, Passage, build_annotation, CausalEdge

INC = Direction.INCREASE
DEC = Direction.DECREASE


def _edge(source: str, target: str, direction=INC) -> CausalEdge:
    return CausalEdge(source, target, direction)


def _ann(pid: str, annotator: str, edges) -> Annotation:
    return build_annotation(pid, annotator, edges, Origin.HUMAN)


def threshold_recovery_passage(pid: str, block: str):
    """One passage where mean Spearman is 1.0 exactly for T in (0.4, 0.6].

    Gold has two edges; competitor sources overlap the gold sources by
    3/5, 2/5, 1/5, or 0/5 tokens, so their unigram-F similarities are
    0.6, 0.4, 0.2, 0.0. The human ranking is A > B > C.
    """
    s_g1 = f"{block}a1 {block}a2 {block}a3 {block}a4 {block}a5"
    s_g2 = f"{block}b1 {block}b2 {block}b3 {block}b4 {block}b5"
    t1 = f"{block}t1 {block}t2"
    t2 = f"{block}u1 {block}u2"

    sim06_g1 = f"{block}a1 {block}a2 {block}a3 {block}x1 {block}x2"
    sim06_g2 = f"{block}b1 {block}b2 {block}b3 {block}x3 {block}x4"
    sim04_g2_v1 = f"{block}b1 {block}b2 {block}y1 {block}y2 {block}y3"
    sim04_g2_v2 = f"{block}b1 {block}b2 {block}y4 {block}y5 {block}y6"
    sim02_g1 = f"{block}a1 {block}z1 {block}z2 {block}z3 {block}z4"
    disjoint = f"{block}q1 {block}q2 {block}q3 {block}q4 {block}q5"

    gold = _ann(pid, "gold", [_edge(s_g1, t1), _edge(s_g2, t2)])
    a = _ann(pid, "a", [_edge(sim06_g1, t1), _edge(sim06_g2, t2)])
    b = _ann(pid, "b", [_edge(sim06_g1, t1), _edge(sim04_g2_v1, t2), _edge(sim04_g2_v2, t2)])
    c = _ann(pid, "c", [_edge(sim02_g1, t1), _edge(disjoint, f"{block}v1 {block}v2")])
    return gold, a, b, c


def threshold_recovery_evals(n_passages: int = 3) -> list[PassageEval]:
    evals = []
    for i in range(n_passages):
        pid = f"tr{i:02d}"
        gold, a, b, c = threshold_recovery_passage(pid, block=f"w{i}")
        human = Ranking(
            {a.annotation_id: 1.0, b.annotation_id: 2.0, c.annotation_id: 3.0}
        )
        evals.append(
            PassageEval(
                passage_id=pid,
                annotations=(gold, a, b, c),
                gold_id=gold.annotation_id,
                human=human,
            )
        )
    return evals


def threshold_recovery_judgments(pid: str, gold, a, b, c) -> list[Judgment]:
    """Round-robin outcomes whose Elo order is gold > a > b > c."""
    g, ai, bi, ci = (x.annotation_id for x in (gold, a, b, c))
    games = [
        (g, ai, Outcome.A_WINS),
        (g, bi, Outcome.A_WINS),
        (g, ci, Outcome.A_WINS),
        (ai, bi, Outcome.A_WINS),
        (ai, ci, Outcome.A_WINS),
        (bi, ci, Outcome.A_WINS),
    ]
    return [
        Judgment(f"{pid}-j{k}", pid, left, right, outcome, "umpire")
        for k, (left, right, outcome) in enumerate(games)
    ]


def directional_sanity_passage(pid: str, block: str):
    """Quality differences are direction-only: A has 0 flips, B 1, C 2.

    Sources are 5-token paraphrases sharing a 4-token prefix with the gold
    (similarity clears the usual BLEU/unigram-F/alignment thresholds);
    every annotation carries the same off-topic edge and the gold has one
    edge nobody matches, so the partial-positive score still discriminates
    flip counts. C's first edge is an exact copy, which keeps the strict
    exact-match baseline non-degenerate (and wrong).
    """

    def phrase(tag: str, last: str) -> str:
        return f"{block}{tag}1 {block}{tag}2 {block}{tag}3 {block}{tag}4 {block}{tag}{last}"

    gold_sources = [phrase(t, "5") for t in ("a", "b", "c")]
    para_sources = [phrase(t, "6") for t in ("a", "b", "c")]
    targets = [f"{block}t{k}1 {block}t{k}2" for k in range(3)]
    off_topic = _edge(f"{block}x1 {block}x2 {block}x3", f"{block}x4 {block}x5")
    unmatched_gold = _edge(f"{block}y1 {block}y2 {block}y3", f"{block}y4 {block}y5")

    gold = _ann(
        pid,
        "gold",
        [_edge(s, t) for s, t in zip(gold_sources, targets)] + [unmatched_gold],
    )
    a = _ann(
        pid,
        "a",
        [_edge(s, t) for s, t in zip(para_sources, targets)] + [off_topic],
    )
    b = _ann(
        pid,
        "b",
        [
            _edge(para_sources[0], targets[0]),
            _edge(para_sources[1], targets[1], DEC),
            _edge(para_sources[2], targets[2]),
            off_topic,
        ],
    )
    c = _ann(
        pid,
        "c",
        [
            _edge(gold_sources[0], targets[0]),
            _edge(para_sources[1], targets[1], DEC),
            _edge(para_sources[2], targets[2], DEC),
            off_topic,
        ],
    )
    return gold, a, b, c


def directional_sanity_evals(n_passages: int = 4) -> list[PassageEval]:
    evals = []
    for i in range(n_passages):
        pid = f"ds{i:02d}"
        gold, a, b, c = directional_sanity_passage(pid, block=f"d{i}")
        human = Ranking(
            {a.annotation_id: 1.0, b.annotation_id: 2.0, c.annotation_id: 3.0}
        )
        evals.append(
            PassageEval(
                passage_id=pid,
                annotations=(gold, a, b, c),
                gold_id=gold.annotation_id,
                human=human,
            )
        )
    return evals


def random_edges(rng, max_edges: int = 6, phrases=("aa", "bb", "cc", "dd")):
    """Random small edge sets over a tiny phrase alphabet (duplicates allowed)."""
    n = rng.randrange(max_edges + 1)
    return [
        CausalEdge(
            rng.choice(phrases),
            rng.choice(phrases),
            rng.choice((INC, DEC)),
        )
        for _ in range(n)
    ]
