import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from fcmeval.elo import (
    Judgment,
    Outcome,
    PairingPlan,
    TournamentConfig,
    apply_judgment,
    build_pairings,
    expected_scores,
    gold_of,
    run_tournament,
)
from fcmeval.errors import (
    EmptyLeaderboard,
    MixedPassages,
    NoEligibleRater,
    SelfRating,
    UnknownAnnotation,
)

CONFIG = TournamentConfig()


def _judgment(jid, a, b, outcome, rater="r", pid="p"):
    return Judgment(jid, pid, a, b, outcome, rater)


class TestExpectedScores:
    def test_equal_ratings(self):
        assert expected_scores(1000, 1000) == (0.5, 0.5)

    def test_two_hundred_point_gap(self):
        e_a, _ = expected_scores(1200, 1000)
        assert e_a == pytest.approx(0.759747, abs=1e-6)

    def test_four_hundred_point_gap_closed_form(self):
        e_a, _ = expected_scores(1000, 1400)
        assert e_a == pytest.approx(1 / 11, abs=1e-12)

    @given(st.floats(0, 3000), st.floats(0, 3000))
    def test_sum_to_one(self, r_a, r_b):
        e_a, e_b = expected_scores(r_a, r_b)
        assert e_a + e_b == pytest.approx(1.0, abs=1e-12)

    @given(st.floats(0, 3000), st.floats(0, 3000))
    def test_mirror_identity(self, r_a, r_b):
        assert expected_scores(r_a, r_b)[0] == expected_scores(r_b, r_a)[1]


class TestApplyJudgment:
    def test_equal_ratings_win_shifts_sixteen(self):
        updated = apply_judgment({"A": 1000.0, "B": 1000.0}, _judgment("j", "A", "B", Outcome.A_WINS), CONFIG)
        assert updated == {"A": 1016.0, "B": 984.0}

    def test_equal_ratings_tie_unchanged(self):
        updated = apply_judgment({"A": 1000.0, "B": 1000.0}, _judgment("j", "A", "B", Outcome.TIE), CONFIG)
        assert updated == {"A": 1000.0, "B": 1000.0}

    def test_upset_loss_magnitude(self):
        updated = apply_judgment({"A": 1200.0, "B": 1000.0}, _judgment("j", "A", "B", Outcome.B_WINS), CONFIG)
        delta = 32 * 0.7597469266479578
        assert updated["A"] == pytest.approx(1200 - delta, abs=1e-6)
        assert updated["B"] == pytest.approx(1000 + delta, abs=1e-6)

    def test_seeds_missing_at_initial_rating(self):
        updated = apply_judgment({}, _judgment("j", "A", "B", Outcome.A_WINS), CONFIG)
        assert updated == {"A": 1016.0, "B": 984.0}

    def test_seeding_disabled_raises(self):
        with pytest.raises(UnknownAnnotation):
            apply_judgment({}, _judgment("j", "A", "B", Outcome.A_WINS), CONFIG, seed_missing=False)

    def test_self_rating_detected(self):
        judgment = _judgment("j", "A", "B", Outcome.A_WINS, rater="ann")
        with pytest.raises(SelfRating):
            apply_judgment({}, judgment, CONFIG, annotators={"A": "ann", "B": "other"})

    def test_input_not_mutated(self):
        ratings = {"A": 1000.0, "B": 1000.0}
        apply_judgment(ratings, _judgment("j", "A", "B", Outcome.A_WINS), CONFIG)
        assert ratings == {"A": 1000.0, "B": 1000.0}

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=100)
    def test_conservation(self, seed):
        rng = random.Random(seed)
        ratings = {"A": rng.uniform(500, 1500), "B": rng.uniform(500, 1500)}
        before = ratings["A"] + ratings["B"]
        outcome = rng.choice(list(Outcome))
        updated = apply_judgment(ratings, _judgment("j", "A", "B", outcome), CONFIG)
        assert updated["A"] + updated["B"] == pytest.approx(before, abs=1e-9)


class TestRunTournament:
    def test_zero_judgments_average_rank(self):
        board = run_tournament([], CONFIG, annotation_ids=["A", "B", "C"], passage_id="p")
        assert board.ratings == {"A": 1000.0, "B": 1000.0, "C": 1000.0}
        assert board.ranking == {"A": 2.0, "B": 2.0, "C": 2.0}

    def test_single_judgment_orders_pair(self):
        board = run_tournament([_judgment("j1", "A", "B", Outcome.A_WINS)], CONFIG)
        assert board.ranking == {"A": 1.0, "B": 2.0}

    def test_round_robin_order(self):
        judgments = [
            _judgment("j1", "A", "B", Outcome.A_WINS),
            _judgment("j2", "A", "C", Outcome.A_WINS),
            _judgment("j3", "B", "C", Outcome.A_WINS),
        ]
        board = run_tournament(judgments, CONFIG)
        assert board.ratings["A"] > board.ratings["B"] > board.ratings["C"]

    def test_canonical_order_not_arrival_order(self):
        judgments = [
            _judgment("j2", "A", "C", Outcome.A_WINS),
            _judgment("j3", "B", "C", Outcome.A_WINS),
            _judgment("j1", "A", "B", Outcome.A_WINS),
        ]
        reordered = run_tournament(judgments, CONFIG)
        canonical = run_tournament(sorted(judgments, key=lambda j: j.judgment_id), CONFIG)
        assert reordered.ratings == canonical.ratings

    def test_replay_is_bit_identical(self):
        rng = random.Random(99)
        ids = ["A", "B", "C", "D"]
        judgments = []
        for i in range(50):
            a, b = rng.sample(ids, 2)
            judgments.append(_judgment(f"j{i:03d}", a, b, rng.choice(list(Outcome))))
        first = run_tournament(judgments, CONFIG)
        second = run_tournament(list(reversed(judgments)), CONFIG)
        assert first.ratings == second.ratings
        assert first.ranking == second.ranking

    def test_mixed_passages_rejected(self):
        judgments = [
            _judgment("j1", "A", "B", Outcome.A_WINS, pid="p1"),
            _judgment("j2", "A", "B", Outcome.A_WINS, pid="p2"),
        ]
        with pytest.raises(MixedPassages):
            run_tournament(judgments, CONFIG)

    def test_ranking_invariant_under_initial_rating_shift(self):
        judgments = [
            _judgment("j1", "A", "B", Outcome.A_WINS),
            _judgment("j2", "B", "C", Outcome.TIE),
            _judgment("j3", "A", "C", Outcome.B_WINS),
        ]
        base = run_tournament(judgments, TournamentConfig(initial_rating=1000.0))
        shifted = run_tournament(judgments, TournamentConfig(initial_rating=1250.0))
        assert base.ranking == shifted.ranking
        assert base.ratings != shifted.ratings

    def test_games_played(self):
        board = run_tournament(
            [_judgment("j1", "A", "B", Outcome.TIE)], CONFIG, annotation_ids=["A", "B", "C"]
        )
        assert board.games_played == {"A": 1, "B": 1, "C": 0}


class TestGoldOf:
    def test_top_rated(self):
        board = run_tournament([_judgment("j1", "A", "B", Outcome.A_WINS)], CONFIG)
        assert gold_of(board) == "A"

    def test_tie_breaks_to_smallest_id(self):
        board = run_tournament([], CONFIG, annotation_ids=["zed", "abc"], passage_id="p")
        assert gold_of(board) == "abc"

    def test_single_annotation(self):
        board = run_tournament([], CONFIG, annotation_ids=["only"], passage_id="p")
        assert gold_of(board) == "only"

    def test_empty_board(self):
        board = run_tournament([], CONFIG, annotation_ids=[], passage_id="p")
        with pytest.raises(EmptyLeaderboard):
            gold_of(board)


def _triple_passage():
    return {"p": [("p/a", "ana"), ("p/b", "ben"), ("p/c", "cal")]}


class TestBuildPairings:
    def test_eligibility_forcing(self):
        plan = build_pairings(_triple_passage(), ["ana", "ben", "cal"], seed=3, overlap_fraction=0.0)
        assert len(plan.assignments) == 3
        authors = {"p/a": "ana", "p/b": "ben", "p/c": "cal"}
        for assignment in plan.assignments:
            assert assignment.rater_id not in (
                authors[assignment.left],
                authors[assignment.right],
            )

    def test_deterministic_given_seed(self):
        annotations = {
            "p": [("p/a", "ana"), ("p/b", "ben"), ("p/c", "cal"), ("p/d", "dee")]
        }
        raters = ["ana", "ben", "cal", "dee", "eve", "fin", "gus"]
        first = build_pairings(annotations, raters, seed=11, overlap_fraction=0.25)
        second = build_pairings(annotations, raters, seed=11, overlap_fraction=0.25)
        assert first == second
        different = build_pairings(annotations, raters, seed=12, overlap_fraction=0.25)
        assert first != different

    def test_full_overlap_gives_two_distinct_raters(self):
        annotations = {
            "p": [("p/a", "ana"), ("p/b", "ben"), ("p/c", "cal"), ("p/d", "dee")]
        }
        raters = ["ana", "ben", "cal", "dee", "eve", "fin", "gus"]
        plan = build_pairings(annotations, raters, seed=5, overlap_fraction=1.0)
        seen: dict[frozenset, set] = {}
        for assignment in plan.assignments:
            key = frozenset((assignment.left, assignment.right))
            seen.setdefault(key, set()).add(assignment.rater_id)
        assert len(seen) == 6
        assert all(len(raters_for_pair) == 2 for raters_for_pair in seen.values())

    def test_no_eligible_rater(self):
        with pytest.raises(NoEligibleRater):
            build_pairings({"p": [("p/a", "ana"), ("p/b", "ben")]}, ["ana", "ben"], seed=0)

    def test_never_assigns_own_annotation_property(self):
        rng = random.Random(7)
        for trial in range(20):
            n_annotators = rng.randint(3, 6)
            authors = [f"r{i}" for i in range(n_annotators)]
            annotations = {
                "p": [(f"p/{a}", a) for a in authors],
            }
            raters = authors + [f"extra{i}" for i in range(rng.randint(0, 3))]
            plan = build_pairings(annotations, raters, seed=trial, overlap_fraction=0.5)
            author_of = dict(annotations["p"])
            for assignment in plan.assignments:
                assert assignment.rater_id != author_of[assignment.left]
                assert assignment.rater_id != author_of[assignment.right]

    def test_sides_randomized_but_deterministic(self):
        annotations = {
            "p": [("p/a", "ana"), ("p/b", "ben"), ("p/c", "cal"), ("p/d", "dee")]
        }
        raters = ["eve", "fin", "gus"]
        plan = build_pairings(annotations, raters, seed=21, overlap_fraction=0.0)
        sides = [(a.left, a.right) for a in plan.assignments]
        assert sides == [(a.left, a.right) for a in build_pairings(annotations, raters, seed=21, overlap_fraction=0.0).assignments]
        # with six pairs, at least one should present the lexicographically
        # larger annotation on the left
        assert any(left > right for left, right in sides)

    def test_overlap_skipped_when_impossible(self):
        plan = build_pairings(_triple_passage(), ["ana", "ben", "cal"], seed=3, overlap_fraction=1.0)
        assert isinstance(plan, PairingPlan)
        assert len(plan.skipped_overlaps) == 3  # only one eligible rater per pair
