from __future__ import annotations

import json
from datetime import datetime, timedelta, timezone

from anveshana.corpus import Difficulty, build_corpus
from anveshana.store import PersistedStore, learner_state_dict, replay_events

from .conftest import corpus_of, make_challenge


def test_corpus_snapshot_round_trip(tmp_path):
    store = PersistedStore(tmp_path)
    corpus = corpus_of([make_challenge(i, difficulty=Difficulty.HARD) for i in range(5)])
    store.save_corpus(corpus)
    assert store.load_corpus() == corpus
    assert not (tmp_path / "corpus.csv.tmp").exists()


def test_missing_snapshot_loads_empty(tmp_path):
    assert len(PersistedStore(tmp_path).load_corpus()) == 0


def test_event_log_append_and_read(tmp_path):
    store = PersistedStore(tmp_path)
    store.append_event({"kind": "learner_created", "learner_id": "a", "ts": "2025-01-01T00:00:00+00:00"})
    store.append_event({"kind": "corpus_uploaded", "accepted": 3, "rejected": 0,
                        "ts": "2025-01-01T00:00:01+00:00"})
    records = store.read_events()
    assert [r["kind"] for r in records] == ["learner_created", "corpus_uploaded"]
    assert all(r["v"] == 1 for r in records)  # schema-versioned lines


def test_replay_reconstructs_state(tmp_path):
    store = PersistedStore(tmp_path)
    t0 = datetime(2025, 5, 1, 10, 0, tzinfo=timezone.utc)
    store.append_event({"kind": "learner_created", "learner_id": "a", "ts": t0.isoformat()})
    store.append_event({
        "kind": "submission", "learner_id": "a", "challenge_id": "q1",
        "category": "Machine Learning", "ts": t0.isoformat(),
        "outcome": "Correct", "method": "ExactMatch", "similarity": None,
        "first_solve": True, "points_awarded": 10, "time_to_solution_ms": 1200,
        "new_badges": ["first-solve"],
    })
    store.append_event({
        "kind": "submission", "learner_id": "a", "challenge_id": "q2",
        "category": "Machine Learning", "ts": (t0 + timedelta(days=1)).isoformat(),
        "outcome": "Incorrect", "method": "SemanticMatch", "similarity": 0.1,
        "first_solve": False, "points_awarded": 0, "time_to_solution_ms": 300,
        "new_badges": [],
    })
    states = store.replay()
    state = states["a"]
    assert state.points == 10 and state.level == 1
    assert state.solved == frozenset({"q1"})
    assert state.streak_days == 2
    assert state.badges == frozenset({"first-solve"})
    record = state.per_category_mastery["Machine Learning"]
    # 0.25 -> correct 0.475 -> incorrect 0.3325
    assert abs(record.mastery - 0.3325) < 1e-12
    assert record.attempts == 2


def test_replay_ignores_duplicate_solves(tmp_path):
    base = {
        "kind": "submission", "learner_id": "a", "challenge_id": "q1",
        "category": "C", "outcome": "Correct", "method": "ExactMatch",
        "similarity": None, "first_solve": True, "points_awarded": 20,
        "time_to_solution_ms": 0, "new_badges": [],
    }
    t = datetime(2025, 5, 1, tzinfo=timezone.utc)
    events = [
        {"kind": "learner_created", "learner_id": "a", "ts": t.isoformat()},
        {**base, "ts": t.isoformat()},
        {**base, "ts": (t + timedelta(minutes=1)).isoformat(), "points_awarded": 0,
         "first_solve": False},
    ]
    state = replay_events(events)["a"]
    assert state.points == 20 and state.solved == frozenset({"q1"})


def test_state_snapshot_file(tmp_path):
    store = PersistedStore(tmp_path)
    states = replay_events([
        {"kind": "learner_created", "learner_id": "zoe",
         "ts": "2025-02-02T00:00:00+00:00"},
    ])
    store.snapshot_states(states)
    payload = json.loads((tmp_path / "learners.json").read_text())
    assert payload["zoe"]["points"] == 0
    assert payload["zoe"] == learner_state_dict(states["zoe"])


def test_build_corpus_equality_is_field_for_field(tmp_path):
    corpus = corpus_of([make_challenge(1)])
    other = corpus_of([make_challenge(1)])
    assert corpus == other
    assert corpus != build_corpus([])[0]
