import json

import pytest

from fcmeval.elo import Judgment, Outcome, PairAssignment, TournamentConfig, run_tournament
from fcmeval.errors import SchemaMismatch, SelfRating, StorageError, ValidationError
from fcmeval.model import Origin, Passage, build_annotation, edges_from_pairs
from fcmeval.storage import (
    JudgmentLog,
    ResultTable,
    Workspace,
    export_results,
    load_dataset,
    load_schedule,
    render_csv,
    save_dataset,
    save_schedule,
)


def _sample_dataset():
    passages = {
        "p1": Passage("p1", "First passage text.", "source A"),
        "p2": Passage("p2", "Second passage text.", "source B"),
    }
    annotations = [
        build_annotation(
            "p1",
            "ann",
            edges_from_pairs([("a b", "c d", "increase"), ("e", "f", "decrease")]),
            Origin.HUMAN,
            known_passages=passages,
        ),
        build_annotation(
            "p2",
            "model",
            edges_from_pairs([("x", "y", "increase")]),
            Origin.MODEL_FEW_SHOT,
            known_passages=passages,
        ),
    ]
    return passages, annotations


class TestDatasetRoundTrip:
    def test_save_then_load_reproduces_values(self, tmp_path):
        passages, annotations = _sample_dataset()
        path = tmp_path / "dataset.jsonl"
        save_dataset(path, passages, annotations)
        loaded = load_dataset(path)
        assert dict(loaded.passages) == passages
        assert list(loaded.annotations) == annotations

    def test_two_passage_file(self, tmp_path):
        passages, annotations = _sample_dataset()
        path = tmp_path / "dataset.jsonl"
        save_dataset(path, passages, annotations)
        assert len(load_dataset(path).passages) == 2

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        dataset = load_dataset(path)
        assert dataset.passages == {} and dataset.annotations == ()

    def test_unknown_direction_reports_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        record = {
            "passage_id": "p1",
            "text": "t",
            "annotations": [
                {"annotator_id": "a", "edges": [{"source": "x", "target": "y", "direction": "sideways"}]}
            ],
        }
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        with pytest.raises(ValidationError) as exc_info:
            load_dataset(path)
        assert exc_info.value.line == 1

    def test_invalid_json_reports_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"passage_id": "p1", "text": "t"}\nnot json\n', encoding="utf-8")
        with pytest.raises(ValidationError) as exc_info:
            load_dataset(path)
        assert exc_info.value.line == 2

    def test_schema_mismatch(self, tmp_path):
        path = tmp_path / "versioned.jsonl"
        path.write_text('{"schema_version": 999}\n', encoding="utf-8")
        with pytest.raises(SchemaMismatch):
            load_dataset(path)

    def test_duplicate_passage_id(self, tmp_path):
        path = tmp_path / "dup.jsonl"
        record = json.dumps({"passage_id": "p1", "text": "t"})
        path.write_text(record + "\n" + record + "\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            load_dataset(path)

    def test_weight_accepted_and_preserved(self, tmp_path):
        path = tmp_path / "weighted.jsonl"
        record = {
            "passage_id": "p1",
            "text": "t",
            "annotations": [
                {
                    "annotator_id": "a",
                    "edges": [{"source": "x", "target": "y", "direction": "increase", "weight": 0.8}],
                }
            ],
        }
        path.write_text(json.dumps(record) + "\n", encoding="utf-8")
        dataset = load_dataset(path)
        assert dataset.annotations[0].edges[0].weight == 0.8

    def test_missing_file(self, tmp_path):
        with pytest.raises(StorageError):
            load_dataset(tmp_path / "missing.jsonl")


class TestJudgmentLog:
    def _judgment(self, jid="j1", rater="r1"):
        return Judgment(jid, "p1", "p1/a", "p1/b", Outcome.A_WINS, rater)

    def test_fresh_append(self, tmp_path):
        log = JudgmentLog(tmp_path / "log.jsonl")
        assert log.append(self._judgment()) == "new"
        assert len(log.judgments()) == 1

    def test_duplicate_append_is_noop(self, tmp_path):
        path = tmp_path / "log.jsonl"
        log = JudgmentLog(path)
        log.append(self._judgment())
        before = path.read_bytes()
        assert log.append(self._judgment()) == "duplicate"
        assert path.read_bytes() == before

    def test_self_rating_rejected(self, tmp_path):
        log = JudgmentLog(
            tmp_path / "log.jsonl", annotators={"p1/a": "r1", "p1/b": "r2"}
        )
        with pytest.raises(SelfRating):
            log.append(self._judgment(rater="r1"))

    def test_replay_preserves_append_order(self, tmp_path):
        path = tmp_path / "log.jsonl"
        log = JudgmentLog(path)
        for i in (3, 1, 2):
            log.append(self._judgment(jid=f"j{i}"))
        replayed = JudgmentLog(path)
        assert [j.judgment_id for j in replayed.judgments()] == ["j3", "j1", "j2"]

    def test_replayed_tournament_identical(self, tmp_path):
        path = tmp_path / "log.jsonl"
        log = JudgmentLog(path)
        log.append(Judgment("j1", "p1", "p1/a", "p1/b", Outcome.A_WINS, "r"))
        log.append(Judgment("j2", "p1", "p1/a", "p1/b", Outcome.TIE, "r"))
        config = TournamentConfig()
        original = run_tournament(log.judgments(), config)
        replayed = run_tournament(JudgmentLog(path).judgments(), config)
        assert original == replayed

    def test_contains(self, tmp_path):
        log = JudgmentLog(tmp_path / "log.jsonl")
        log.append(self._judgment())
        assert "j1" in log and "j2" not in log


class TestSchedule:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "schedule.jsonl"
        assignments = [
            PairAssignment("p1", "p1/a", "p1/b", "r1"),
            PairAssignment("p1", "p1/b", "p1/c", "r2", is_overlap=True),
        ]
        save_schedule(path, assignments)
        loaded = load_schedule(path)
        assert [a for _, a in loaded] == assignments
        assert [aid for aid, _ in loaded] == ["a00000", "a00001"]


class TestExportResults:
    def _table(self):
        return ResultTable(
            name="scores",
            header=("passage_id", "score"),
            rows=(("p1", 0.5), ("p2", 1 / 3)),
        )

    def test_csv_formatting(self):
        content = render_csv(self._table())
        assert content == "passage_id,score\np1,0.500000\np2,0.333333\n"

    def test_export_writes_manifest(self, tmp_path):
        manifest = export_results([self._table()], tmp_path, config={"x": 1}, seed=7)
        assert (tmp_path / "scores.csv").exists()
        assert manifest["seed"] == 7
        written = json.loads((tmp_path / "manifest.json").read_text())
        assert written == manifest

    def test_reexport_byte_identical(self, tmp_path):
        export_results([self._table()], tmp_path, config={"x": 1}, seed=7)
        first = {
            name: (tmp_path / name).read_bytes()
            for name in ("scores.csv", "manifest.json")
        }
        export_results([self._table()], tmp_path, config={"x": 1}, seed=7)
        second = {
            name: (tmp_path / name).read_bytes()
            for name in ("scores.csv", "manifest.json")
        }
        assert first == second

    def test_unwritable_directory(self, tmp_path):
        blocker = tmp_path / "not-a-directory"
        blocker.write_text("plain file", encoding="utf-8")
        with pytest.raises(StorageError):
            export_results([self._table()], blocker / "results", config={}, seed=0)


class TestWorkspace:
    def test_create_lays_out_paths(self, tmp_path):
        ws = Workspace.create(tmp_path / "ws")
        assert ws.root.exists()
        assert ws.results_dir.exists()
        assert ws.dataset_file.name == "dataset.jsonl"
        assert ws.judgment_file.name == "judgments.jsonl"
