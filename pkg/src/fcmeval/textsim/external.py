"""Client for an external learned-scorer service.

Protocol: POST {base}/score with {"candidate", "reference"} returning
{"score": number}, and POST {base}/score_batch with parallel arrays
returning {"scores": [...]}. Scores are passed through verbatim; negative
values and values above 1 are legal.
"""

from __future__ import annotations

import threading
from typing import Optional, Sequence

import httpx

from ..errors import EndpointError, MalformedScore


class ExternalScorerClient:
    def __init__(
        self,
        base_url: str,
        *,
        timeout: float = 30.0,
        http: Optional[httpx.Client] = None,
    ):
        self.base_url = base_url.rstrip("/")
        self._http = http or httpx.Client(timeout=timeout)
        self._cache: dict[tuple[str, str], float] = {}
        self._lock = threading.Lock()

    def _post(self, path: str, payload: dict) -> dict:
        try:
            response = self._http.post(self.base_url + path, json=payload)
            response.raise_for_status()
            return response.json()
        except (httpx.HTTPError, ValueError) as exc:
            raise EndpointError(f"scorer request to {path} failed: {exc}") from exc

    @staticmethod
    def _as_score(value) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise MalformedScore(f"scorer returned a non-numeric score: {value!r}")
        return float(value)

    def score(self, candidate: str, reference: str) -> float:
        key = (candidate, reference)
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        body = self._post("/score", {"candidate": candidate, "reference": reference})
        value = self._as_score(body.get("score"))
        with self._lock:
            self._cache[key] = value
        return value

    def score_batch(self, candidates: Sequence[str], references: Sequence[str]) -> list[float]:
        if len(candidates) != len(references):
            raise ValueError("candidates and references must have equal length")
        body = self._post(
            "/score_batch", {"candidates": list(candidates), "references": list(references)}
        )
        scores = body.get("scores")
        if not isinstance(scores, list) or len(scores) != len(candidates):
            raise MalformedScore("scorer batch reply is not a parallel array")
        values = [self._as_score(s) for s in scores]
        with self._lock:
            for cand, ref, value in zip(candidates, references, values):
                self._cache[(cand, ref)] = value
        return values
