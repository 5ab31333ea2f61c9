"""Durable platform state: corpus snapshot plus append-only JSONL event log.

The event log is the source of truth for learner state — replaying it from
an empty map reproduces every learner exactly. Each line is one schema-
versioned record ("v" field): a learner-creation marker, a graded
submission, or a corpus-upload marker. Corpus snapshots are written to a
temp file and swapped in atomically.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import replace
from datetime import datetime
from pathlib import Path

from .adaptive import AdaptiveConfig, DEFAULT_ADAPTIVE, mastery_for, update_mastery
from .corpus import Corpus, build_corpus, export_corpus, parse_challenges
from .gamification import (DEFAULT_GAMIFICATION, GamificationConfig, LearnerState, Outcome,
                           compute_level, new_learner, update_streak)

RECORD_VERSION = 1


def learner_state_dict(state: LearnerState) -> dict:
    return {
        "learner_id": state.learner_id,
        "points": state.points,
        "level": state.level,
        "streak_days": state.streak_days,
        "last_active_day": state.last_active_day.isoformat() if state.last_active_day else None,
        "badges": sorted(state.badges),
        "solved": sorted(state.solved),
        "per_category_mastery": {
            category: {"mastery": record.mastery, "attempts": record.attempts}
            for category, record in sorted(state.per_category_mastery.items())
        },
    }


class PersistedStore:
    """File-backed store for one deployment's corpus and learner history."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.corpus_path = self.data_dir / "corpus.csv"
        self.events_path = self.data_dir / "events.jsonl"
        self.states_path = self.data_dir / "learners.json"
        self._append_lock = threading.Lock()

    # -- corpus snapshot ----------------------------------------------------

    def load_corpus(self) -> Corpus:
        if not self.corpus_path.exists():
            return build_corpus([])[0]
        challenges, _ = parse_challenges(self.corpus_path.read_bytes(), "csv")
        return build_corpus(challenges)[0]

    def save_corpus(self, corpus: Corpus) -> None:
        """Write-new-then-swap so a failed write never corrupts the snapshot."""
        tmp = self.corpus_path.with_suffix(".csv.tmp")
        tmp.write_bytes(export_corpus(corpus, "csv"))
        os.replace(tmp, self.corpus_path)

    # -- event log ----------------------------------------------------------

    def append_event(self, record: dict) -> None:
        line = json.dumps({"v": RECORD_VERSION, **record}, ensure_ascii=False)
        with self._append_lock:
            with self.events_path.open("a", encoding="utf-8") as handle:
                handle.write(line + "\n")

    def read_events(self) -> list[dict]:
        if not self.events_path.exists():
            return []
        with self.events_path.open(encoding="utf-8") as handle:
            return [json.loads(line) for line in handle if line.strip()]

    # -- learner state ------------------------------------------------------

    def snapshot_states(self, states: dict[str, LearnerState]) -> None:
        """Periodic human-readable snapshot; the log remains authoritative."""
        tmp = self.states_path.with_suffix(".json.tmp")
        payload = {lid: learner_state_dict(s) for lid, s in sorted(states.items())}
        tmp.write_text(json.dumps(payload, ensure_ascii=False, indent=2), encoding="utf-8")
        os.replace(tmp, self.states_path)

    def replay(self, adaptive: AdaptiveConfig = DEFAULT_ADAPTIVE,
               gamification: GamificationConfig = DEFAULT_GAMIFICATION,
               ) -> dict[str, LearnerState]:
        """Rebuild all learner states by replaying the event log from empty."""
        return replay_events(self.read_events(), adaptive, gamification)


def replay_events(events: list[dict],
                  adaptive: AdaptiveConfig = DEFAULT_ADAPTIVE,
                  gamification: GamificationConfig = DEFAULT_GAMIFICATION,
                  ) -> dict[str, LearnerState]:
    states: dict[str, LearnerState] = {}
    for record in events:
        kind = record.get("kind")
        if kind == "learner_created":
            states.setdefault(record["learner_id"], new_learner(record["learner_id"]))
        elif kind == "submission":
            states[record["learner_id"]] = _apply_submission(
                states[record["learner_id"]], record, adaptive, gamification)
    return states


def _apply_submission(state: LearnerState, record: dict, adaptive: AdaptiveConfig,
                      gamification: GamificationConfig) -> LearnerState:
    moment = datetime.fromisoformat(record["ts"])
    state = update_streak(state, moment)

    outcome = Outcome(record["outcome"])
    category = record["category"]
    mastery = update_mastery(mastery_for(state, category, adaptive), outcome, adaptive)
    per_category = dict(state.per_category_mastery)
    per_category[category] = mastery
    state = replace(state, per_category_mastery=per_category)

    if outcome is Outcome.CORRECT and record["challenge_id"] not in state.solved:
        points = state.points + int(record["points_awarded"])
        state = replace(state, solved=state.solved | {record["challenge_id"]},
                        points=points, level=compute_level(points, gamification))
    if record.get("new_badges"):
        state = replace(state, badges=state.badges | frozenset(record["new_badges"]))
    return state
