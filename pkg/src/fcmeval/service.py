"""HTTP service for collecting pairwise judgments.

Raters open a session, pull their next scheduled pair, and submit a
winner or a tie. Pair presentations are anonymized: the response carries
edge lists only, never annotator identity. Judgment writes go through the
append-only log with idempotent client ids, so retries never double-count.
"""

from __future__ import annotations

import secrets
import threading
from dataclasses import dataclass
from typing import Optional

from fastapi import FastAPI, HTTPException, Query
from pydantic import BaseModel

from .config import RunConfig, load_config
from .elo import Judgment, Outcome, PairAssignment, TournamentConfig, run_tournament
from .errors import (
    AlreadyJudged,
    InvalidSession,
    SelfRating,
    StorageError,
    UnknownPair,
    UnknownPassage,
    UnknownRater,
)
from .storage import Dataset, JudgmentLog, Workspace, load_schedule

API_PREFIX = "/v1"


class SessionRequest(BaseModel):
    rater_id: str


class JudgmentRequest(BaseModel):
    session: str
    pair_id: str
    outcome: str  # "left" | "right" | "tie"
    client_id: str


@dataclass
class _Session:
    session_id: str
    rater_id: str


class JudgmentService:
    """All mutable state behind one lock; judgment volume is small."""

    def __init__(
        self,
        dataset: Dataset,
        config: RunConfig,
        schedule: list[tuple[str, PairAssignment]],
        log: JudgmentLog,
    ):
        self.dataset = dataset
        self.config = config
        self.log = log
        self.annotators = {
            a.annotation_id: a.annotator_id for a in dataset.annotations
        }
        self.assignments: dict[str, PairAssignment] = dict(schedule)
        self.by_rater: dict[str, list[str]] = {}
        for assignment_id, assignment in schedule:
            self.by_rater.setdefault(assignment.rater_id, []).append(assignment_id)
        self.sessions: dict[str, _Session] = {}
        self.judged: set[str] = set()
        for judgment in log.judgments():
            assignment_id = judgment.judgment_id.split("|", 1)[0]
            self.judged.add(assignment_id)
        self.lock = threading.Lock()

    def open_session(self, rater_id: str) -> str:
        if rater_id not in self.config.raters:
            raise UnknownRater(f"rater {rater_id!r} is not on the roster")
        token = secrets.token_urlsafe(16)
        with self.lock:
            self.sessions[token] = _Session(session_id=token, rater_id=rater_id)
        return token

    def _session(self, token: str) -> _Session:
        session = self.sessions.get(token)
        if session is None:
            raise InvalidSession("invalid or expired session")
        return session

    def progress(self, token: str) -> tuple[int, int]:
        with self.lock:
            session = self._session(token)
            ids = self.by_rater.get(session.rater_id, [])
            done = sum(1 for aid in ids if aid in self.judged)
            return done, len(ids)

    def next_pair(self, token: str) -> Optional[tuple[str, PairAssignment]]:
        """The first unjudged assignment for this rater; stable until judged."""
        with self.lock:
            session = self._session(token)
            for assignment_id in self.by_rater.get(session.rater_id, []):
                if assignment_id not in self.judged:
                    return assignment_id, self.assignments[assignment_id]
            return None

    def submit(self, token: str, pair_id: str, outcome: str, client_id: str) -> str:
        with self.lock:
            session = self._session(token)
            assignment = self.assignments.get(pair_id)
            if assignment is None or assignment.rater_id != session.rater_id:
                raise UnknownPair(f"pair {pair_id!r} was not issued to this session")
            judgment_id = f"{pair_id}|{client_id}"
            if pair_id in self.judged and judgment_id not in self.log:
                raise AlreadyJudged(f"pair {pair_id!r} already has a judgment")
            outcome_map = {"left": Outcome.A_WINS, "right": Outcome.B_WINS, "tie": Outcome.TIE}
            if outcome not in outcome_map:
                raise ValueError(f"outcome must be left, right, or tie, got {outcome!r}")
            judgment = Judgment(
                judgment_id=judgment_id,
                passage_id=assignment.passage_id,
                annotation_a=assignment.left,
                annotation_b=assignment.right,
                outcome=outcome_map[outcome],
                rater_id=session.rater_id,
            )
            status = self.log.append(judgment)
            self.judged.add(pair_id)
            return status

    def standings(self, passage_id: str):
        if passage_id not in self.dataset.passages:
            raise UnknownPassage(f"unknown passage {passage_id!r}")
        with self.lock:
            judgments = self.log.for_passage(passage_id)
        annotation_ids = [
            a.annotation_id for a in self.dataset.annotations_for(passage_id)
        ]
        return run_tournament(
            judgments,
            TournamentConfig(
                k_factor=self.config.k_factor, initial_rating=self.config.initial_rating
            ),
            annotation_ids=annotation_ids,
            passage_id=passage_id,
        )


def _edge_rows(service: JudgmentService, annotation_id: str) -> list[dict]:
    annotation = service.dataset.by_annotation_id()[annotation_id]
    return [
        {"source": e.source, "target": e.target, "direction": e.direction.value}
        for e in annotation.edges
    ]


def create_app(workspace: Workspace, config: Optional[RunConfig] = None) -> FastAPI:
    if config is None:
        config = load_config(workspace.config_file)
    dataset = workspace.load_dataset()
    annotators = {a.annotation_id: a.annotator_id for a in dataset.annotations}
    if not workspace.schedule_file.exists():
        raise StorageError(
            f"no schedule at {workspace.schedule_file}; run the schedule command first"
        )
    schedule = load_schedule(workspace.schedule_file)
    log = workspace.judgment_log(annotators=annotators)
    service = JudgmentService(dataset, config, schedule, log)

    app = FastAPI(title="fcmeval judgment service")
    app.state.service = service

    @app.post(f"{API_PREFIX}/sessions")
    def open_session(request: SessionRequest):
        try:
            token = service.open_session(request.rater_id)
        except UnknownRater as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {"session_id": token}

    @app.get(f"{API_PREFIX}/pairs/next")
    def next_pair(session: str = Query(...)):
        try:
            done, total = service.progress(session)
            pending = service.next_pair(session)
        except InvalidSession:
            raise HTTPException(status_code=401, detail="invalid session")
        if pending is None:
            return {"done": True, "progress": {"done": done, "total": total}}
        assignment_id, assignment = pending
        passage = service.dataset.passages[assignment.passage_id]
        return {
            "pair_id": assignment_id,
            "passage_id": assignment.passage_id,
            "passage_text": passage.text,
            "left": _edge_rows(service, assignment.left),
            "right": _edge_rows(service, assignment.right),
            "progress": {"done": done, "total": total},
        }

    @app.post(f"{API_PREFIX}/judgments")
    def submit_judgment(request: JudgmentRequest):
        try:
            status = service.submit(
                request.session, request.pair_id, request.outcome, request.client_id
            )
        except InvalidSession:
            raise HTTPException(status_code=401, detail="invalid session")
        except UnknownPair as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except SelfRating as exc:
            raise HTTPException(status_code=403, detail=str(exc))
        except AlreadyJudged as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"status": "accepted" if status == "new" else "duplicate"}

    @app.get(f"{API_PREFIX}/standings/{{passage_id}}")
    def standings(passage_id: str):
        try:
            board = service.standings(passage_id)
        except UnknownPassage as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {
            "passage_id": board.passage_id,
            "ratings": dict(board.ratings),
            "ranking": [
                {
                    "annotation_id": aid,
                    "rank": rank,
                    "rating": rating,
                    "games": board.games_played.get(aid, 0),
                }
                for aid, rank, rating in board.ordered()
            ],
        }

    @app.get(f"{API_PREFIX}/guidelines")
    def guidelines():
        return {
            "guidelines": list(config.guidelines),
            "conflict_rule": config.conflict_rule,
        }

    @app.get(f"{API_PREFIX}/progress")
    def progress(session: str = Query(...)):
        try:
            done, total = service.progress(session)
        except InvalidSession:
            raise HTTPException(status_code=401, detail="invalid session")
        return {"done": done, "total": total}

    return app
