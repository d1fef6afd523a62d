import pytest

from fcmeval.errors import EmptyPhrase, UnknownPassage, UnrecognizedDirection
from fcmeval.model import (
    Annotation,
    CausalEdge,
    Direction,
    Origin,
    Passage,
    build_annotation,
    canonicalize_direction,
    normalize_phrase,
    validate_annotation,
)


class TestCanonicalizeDirection:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            ("positive", Direction.INCREASE),
            ("Positive", Direction.INCREASE),
            ("INCREASE", Direction.INCREASE),
            ("+", Direction.INCREASE),
            ("Negative", Direction.DECREASE),
            ("decrease", Direction.DECREASE),
            ("-", Direction.DECREASE),
            ("  negative  ", Direction.DECREASE),
        ],
    )
    def test_table(self, raw, expected):
        assert canonicalize_direction(raw) is expected

    @pytest.mark.parametrize("raw", ["sideways", "", "pos itive", "increase-", "0"])
    def test_rejects_everything_else(self, raw):
        with pytest.raises(UnrecognizedDirection):
            canonicalize_direction(raw)

    def test_idempotent_through_serialization(self):
        for direction in Direction:
            assert canonicalize_direction(direction.value) is direction


class TestNormalizePhrase:
    def test_collapses_whitespace(self):
        assert normalize_phrase("  turbine   structures ") == "turbine structures"

    def test_identity(self):
        assert normalize_phrase("blue mussels") == "blue mussels"

    def test_empty_raises(self):
        with pytest.raises(EmptyPhrase):
            normalize_phrase("   ")

    def test_preserves_casing(self):
        assert normalize_phrase("Blue  Mussels") == "Blue Mussels"


class TestCausalEdge:
    def test_normalizes_on_construction(self):
        edge = CausalEdge(" a  b ", "c\td", Direction.INCREASE)
        assert (edge.source, edge.target) == ("a b", "c d")

    def test_empty_source_raises(self):
        with pytest.raises(EmptyPhrase):
            CausalEdge(" ", "x", Direction.INCREASE)

    def test_weight_ignored_in_equality(self):
        base = CausalEdge("a", "b", Direction.INCREASE)
        weighted = CausalEdge("a", "b", Direction.INCREASE, weight=0.7)
        assert base == weighted

    def test_flipped(self):
        edge = CausalEdge("a", "b", Direction.INCREASE)
        assert edge.flipped().direction is Direction.DECREASE


class TestBuildAnnotation:
    def test_distinct_edges_kept(self):
        edges = [
            CausalEdge("a", "b", Direction.INCREASE),
            CausalEdge("c", "d", Direction.DECREASE),
        ]
        annotation = build_annotation("p1", "ann", edges, Origin.HUMAN)
        assert len(annotation.edges) == 2
        assert annotation.dropped_duplicates == 0

    def test_duplicates_dropped_first_kept(self):
        edges = [
            CausalEdge("a", "b", Direction.INCREASE),
            CausalEdge(" a ", "b", Direction.INCREASE),
        ]
        annotation = build_annotation("p1", "ann", edges, Origin.HUMAN)
        assert len(annotation.edges) == 1
        assert annotation.dropped_duplicates == 1

    def test_direction_distinguishes_edges(self):
        edges = [
            CausalEdge("a", "b", Direction.INCREASE),
            CausalEdge("a", "b", Direction.DECREASE),
        ]
        annotation = build_annotation("p1", "ann", edges, Origin.HUMAN)
        assert len(annotation.edges) == 2

    def test_unknown_passage(self):
        with pytest.raises(UnknownPassage):
            build_annotation("ghost", "ann", [], Origin.HUMAN, known_passages={"p1"})

    def test_known_passage_mapping(self):
        passages = {"p1": Passage("p1", "text")}
        annotation = build_annotation("p1", "ann", [], Origin.HUMAN, known_passages=passages)
        assert annotation.passage_id == "p1"

    def test_deterministic_given_order(self):
        edges = [
            CausalEdge("a", "b", Direction.INCREASE),
            CausalEdge("c", "d", Direction.INCREASE),
            CausalEdge("a", "b", Direction.INCREASE),
        ]
        first = build_annotation("p1", "ann", edges, Origin.HUMAN)
        second = build_annotation("p1", "ann", edges, Origin.HUMAN)
        assert first == second
        assert [e.key() for e in first.edges] == [("a", "b", Direction.INCREASE), ("c", "d", Direction.INCREASE)]

    def test_annotation_id(self):
        annotation = build_annotation("p1", "ann", [], Origin.HUMAN)
        assert annotation.annotation_id == "p1/ann"


class TestValidateAnnotation:
    def test_clean_annotation_passes(self):
        annotation = build_annotation(
            "p1", "ann", [CausalEdge("a", "b", Direction.INCREASE)], Origin.HUMAN
        )
        assert validate_annotation(annotation) == []

    def test_handcrafted_duplicate_flagged(self):
        edge = CausalEdge("a", "b", Direction.INCREASE)
        rogue = Annotation("p1", "ann", (edge, edge), Origin.HUMAN)
        problems = validate_annotation(rogue)
        assert any("duplicate" in p for p in problems)


class TestPassage:
    def test_empty_text_rejected(self):
        with pytest.raises(ValueError):
            Passage("p1", "   ")

    def test_default_split(self):
        from fcmeval.model import Split

        assert Passage("p1", "text").split is Split.UNASSIGNED
