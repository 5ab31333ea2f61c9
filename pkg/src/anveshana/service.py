"""HTTP API: sessions, challenge delivery, grading, dashboards, admin tools.

All request and response bodies are JSON; errors use {"error": code,
"message": text}. Learner endpoints authenticate with a session bearer
token, admin endpoints with the configured admin token. Learner state
transitions are serialized per learner; the corpus snapshot is immutable
and swapped atomically on upload.
"""

from __future__ import annotations

import secrets
import statistics
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timedelta, timezone

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import adaptive as adaptive_ops
from . import gamification as gamify
from .config import PlatformConfig
from .corpus import Challenge, Corpus, Difficulty, IssueCode, ValidationIssue, build_corpus, parse_challenges
from .errors import EmptyCorpus, UnreadableInput
from .analytics import quality_report
from .gamification import LearnerState, Outcome
from .similarity import qa_similarity_distribution
from .store import PersistedStore, learner_state_dict


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass(frozen=True)
class SessionToken:
    token: str  # random 128-bit hex
    learner_id: str
    issued_at: datetime


class Platform:
    """Mutable application state behind the API endpoints."""

    def __init__(self, config: PlatformConfig, store: PersistedStore):
        self.config = config
        self.store = store
        self.adaptive_config = config.adaptive()
        self.gamification_config = config.gamification()
        self.embedder = config.build_embedder()
        self.corpus: Corpus = store.load_corpus()
        self.learners: dict[str, LearnerState] = store.replay(
            self.adaptive_config, self.gamification_config)
        self.telemetry: list[dict] = [r for r in store.read_events()
                                      if r.get("kind") == "submission"]
        self.tokens: dict[str, SessionToken] = {}
        self._registry_lock = threading.Lock()
        self._learner_locks: dict[str, threading.Lock] = {}
        self._last_event_at: dict[str, datetime] = {}

    def learner_lock(self, learner_id: str) -> threading.Lock:
        with self._registry_lock:
            if learner_id not in self._learner_locks:
                self._learner_locks[learner_id] = threading.Lock()
            return self._learner_locks[learner_id]

    def next_event_time(self, learner_id: str) -> datetime:
        """Monotone non-decreasing timestamps per learner, even on clock stalls."""
        now = datetime.now(timezone.utc)
        last = self._last_event_at.get(learner_id)
        if last is not None and now <= last:
            now = last + timedelta(microseconds=1)
        self._last_event_at[learner_id] = now
        return now


def _dashboard(platform: Platform, state: LearnerState) -> dict:
    payload = learner_state_dict(state)
    payload["solved_count"] = len(state.solved)
    del payload["solved"]
    attempts = sum(r.attempts for r in state.per_category_mastery.values())
    payload["totals"] = {
        "corpus_size": len(platform.corpus),
        "categories": len(platform.corpus.category_set),
        "categories_explored": len(state.per_category_mastery),
        "attempts": attempts,
    }
    return payload


def _bearer_token(request: Request) -> str | None:
    header = request.headers.get("authorization", "")
    if header.lower().startswith("bearer "):
        return header[7:].strip()
    return None


def _require_learner(platform: Platform, request: Request) -> str:
    token = _bearer_token(request)
    session = platform.tokens.get(token) if token else None
    if session is None:
        raise ApiError(401, "Unauthorized", "missing or invalid session token")
    return session.learner_id


def _require_admin(platform: Platform, request: Request) -> None:
    if _bearer_token(request) != platform.config.admin_token:
        raise ApiError(401, "Unauthorized", "admin token required")


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception as exc:  # noqa: BLE001
        raise ApiError(400, "InvalidBody", f"request body must be JSON: {exc}") from exc
    if not isinstance(body, dict):
        raise ApiError(400, "InvalidBody", "request body must be a JSON object")
    return body


def create_app(config: PlatformConfig | None = None,
               store: PersistedStore | None = None) -> FastAPI:
    config = config or PlatformConfig()
    store = store or PersistedStore(config.data_dir)
    platform = Platform(config, store)

    app = FastAPI(title="anveshana", version="0.1.0")
    app.state.platform = platform

    @app.exception_handler(ApiError)
    async def _api_error(_request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"error": exc.code, "message": exc.message})

    @app.post("/api/session")
    async def create_session(request: Request):
        body = await _json_body(request)
        learner_id = str(body.get("learner_id") or "").strip()
        if not learner_id:
            raise ApiError(400, "EmptyLearnerId", "learner_id must be non-empty")
        with platform.learner_lock(learner_id):
            if learner_id not in platform.learners:
                platform.learners[learner_id] = gamify.new_learner(learner_id)
                platform.store.append_event({
                    "kind": "learner_created",
                    "learner_id": learner_id,
                    "ts": datetime.now(timezone.utc).isoformat(),
                })
        token = secrets.token_hex(16)
        platform.tokens[token] = SessionToken(
            token=token, learner_id=learner_id, issued_at=datetime.now(timezone.utc))
        return {"token": token}

    @app.get("/api/challenges")
    async def list_challenges(request: Request, category: str | None = None,
                              difficulty: str | None = None):
        _require_learner(platform, request)
        corpus = platform.corpus
        selected = list(corpus.challenges)
        if category is not None:
            if category not in corpus.by_category:
                raise ApiError(404, "UnknownCategory", f"no such category: {category!r}")
            selected = [c for c in selected if c.category == category]
        if difficulty is not None:
            parsed = Difficulty.parse(difficulty)
            if parsed is None:
                raise ApiError(400, "UnknownDifficulty", f"no such difficulty: {difficulty!r}")
            selected = [c for c in selected if c.difficulty == parsed]
        return [c.public_dict() for c in selected]

    @app.get("/api/featured")
    async def featured(request: Request):
        _require_learner(platform, request)
        corpus = platform.corpus
        return [corpus.by_id[cid].public_dict()
                for cid in platform.config.featured_challenge_ids if cid in corpus.by_id]

    @app.get("/api/next")
    async def next_challenge(request: Request, category: str):
        learner_id = _require_learner(platform, request)
        corpus = platform.corpus
        if category not in corpus.by_category:
            raise ApiError(404, "UnknownCategory", f"no such category: {category!r}")
        state = platform.learners[learner_id]
        choice = adaptive_ops.select_next(corpus, state, category,
                                          seed=adaptive_ops.learner_seed(learner_id),
                                          config=platform.adaptive_config)
        if choice is None:
            return Response(status_code=204)
        return choice.public_dict()

    @app.post("/api/submit")
    async def submit(request: Request):
        learner_id = _require_learner(platform, request)
        body = await _json_body(request)
        challenge_id = str(body.get("challenge_id") or "")
        answer = body.get("answer")
        if not challenge_id or not isinstance(answer, str):
            raise ApiError(400, "InvalidBody", "challenge_id and answer are required")
        elapsed_ms = max(0, int(body.get("client_elapsed_ms") or 0))

        corpus = platform.corpus
        challenge = corpus.by_id.get(challenge_id)
        if challenge is None:
            raise ApiError(404, "UnknownChallenge", f"no such challenge: {challenge_id!r}")

        with platform.learner_lock(learner_id):
            state = platform.learners[learner_id]
            result = adaptive_ops.grade(challenge, answer, platform.embedder,
                                        platform.adaptive_config)
            first_solve = result.correct and challenge.id not in state.solved
            points = platform.gamification_config.points[challenge.difficulty] if first_solve else 0
            result = replace(result, first_solve=first_solve, points_awarded=points)

            moment = platform.next_event_time(learner_id)
            state = gamify.update_streak(state, moment)
            outcome = Outcome.CORRECT if result.correct else Outcome.INCORRECT
            mastery = adaptive_ops.update_mastery(
                adaptive_ops.mastery_for(state, challenge.category, platform.adaptive_config),
                outcome, platform.adaptive_config)
            per_category = dict(state.per_category_mastery)
            per_category[challenge.category] = mastery
            state = replace(state, per_category_mastery=per_category)
            if first_solve:
                state = replace(state, solved=state.solved | {challenge.id})
                state = gamify.award_points(state, challenge.difficulty,
                                            platform.gamification_config)
            state, new_badges = gamify.evaluate_badges(state, corpus,
                                                       platform.gamification_config)
            platform.learners[learner_id] = state

            event = {
                "kind": "submission",
                "learner_id": learner_id,
                "challenge_id": challenge.id,
                "category": challenge.category,
                "ts": moment.isoformat(),
                "outcome": outcome.value,
                "method": result.method.value,
                "similarity": result.similarity,
                "first_solve": first_solve,
                "points_awarded": points,
                "time_to_solution_ms": elapsed_ms,
                "new_badges": new_badges,
            }
            platform.store.append_event(event)
            platform.telemetry.append(event)

        return {
            "grade": result.as_dict(),
            "new_badges": new_badges,
            "dashboard": _dashboard(platform, state),
        }

    @app.get("/api/learner/dashboard")
    async def dashboard(request: Request):
        learner_id = _require_learner(platform, request)
        return _dashboard(platform, platform.learners[learner_id])

    @app.post("/api/admin/upload")
    async def upload(request: Request, format: str | None = None):
        _require_admin(platform, request)
        fmt = format or ("json" if "json" in request.headers.get("content-type", "") else "csv")
        data = await request.body()
        try:
            parsed, issues = parse_challenges(data, fmt)
        except UnreadableInput as exc:
            raise ApiError(400, "UnreadableInput", str(exc)) from exc

        corpus = platform.corpus
        staged: list[Challenge] = []
        staged_ids: set[str] = set()
        for index, challenge in enumerate(parsed):
            if challenge.id in corpus.by_id or challenge.id in staged_ids:
                issues.append(ValidationIssue(index, "id", IssueCode.DUPLICATE_ID,
                                              f"record {index}: duplicate id {challenge.id!r}"))
                continue
            staged_ids.add(challenge.id)
            staged.append(challenge)

        merged, build_issues = build_corpus(list(corpus.challenges) + staged)
        issues.extend(build_issues)  # none expected: staging already deduplicated
        platform.store.save_corpus(merged)
        platform.corpus = merged
        platform.store.append_event({
            "kind": "corpus_uploaded",
            "accepted": len(staged),
            "rejected": len({i.record_index for i in issues}),
            "ts": datetime.now(timezone.utc).isoformat(),
        })
        return {
            "accepted": len(staged),
            "rejected": len({i.record_index for i in issues}),
            "issues": [i.as_dict() for i in issues],
        }

    @app.get("/api/admin/quality")
    async def admin_quality(request: Request, with_similarity: bool = False):
        _require_admin(platform, request)
        corpus = platform.corpus
        if len(corpus) == 0:
            raise ApiError(409, "EmptyCorpus", "no challenges loaded")
        histogram = qa_similarity_distribution(corpus, platform.embedder) \
            if with_similarity else None
        return quality_report(corpus, histogram).as_dict()

    @app.get("/api/admin/analytics")
    async def admin_analytics(request: Request):
        _require_admin(platform, request)
        corpus_size = len(platform.corpus)

        def summarize(records: list[dict], denominator: int) -> dict:
            attempts = len(records)
            corrects = sum(1 for r in records if r["outcome"] == Outcome.CORRECT.value)
            solved = {r["challenge_id"] for r in records
                      if r["outcome"] == Outcome.CORRECT.value}
            times = [r["time_to_solution_ms"] for r in records]
            return {
                "attempts": attempts,
                "accuracy": corrects / attempts if attempts else 0.0,
                "completion_rate": len(solved) / denominator if denominator else 0.0,
                "median_time_to_solution_ms": statistics.median(times) if times else 0,
            }

        per_category: dict[str, dict] = {}
        for category in platform.corpus.category_set:
            records = [r for r in platform.telemetry if r["category"] == category]
            if records:
                per_category[category] = summarize(
                    records, len(platform.corpus.by_category[category]))
        return {"overall": summarize(platform.telemetry, corpus_size),
                "per_category": per_category}

    @app.get("/api/export")
    async def export(request: Request):
        _require_admin(platform, request)
        return {
            "challenges": [c.as_dict() for c in platform.corpus.challenges],
            "telemetry": list(platform.telemetry),
        }

    return app
