"""Learner engagement state: points, levels, day streaks, badges.

All transitions are pure functions returning a new LearnerState; the service
layer serializes them per learner. Day boundaries are UTC calendar dates.
Point values, the level curve, and the badge set are deployment
configuration, not fixed behavior.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timedelta, timezone
from typing import TYPE_CHECKING, Mapping

from .corpus import Corpus, Difficulty
from .errors import OutOfOrderEvent

if TYPE_CHECKING:  # adaptive imports Outcome from here; keep the cycle type-only
    from .adaptive import MasteryRecord


class Outcome(enum.Enum):
    CORRECT = "Correct"
    INCORRECT = "Incorrect"


@dataclass(frozen=True)
class ActivityEvent:
    learner_id: str
    challenge_id: str
    timestamp: datetime
    outcome: Outcome
    time_to_solution_ms: int


@dataclass(frozen=True)
class Badge:
    id: str
    name: str
    rule: str  # human-readable condition; earning is monotone


@dataclass(frozen=True)
class GamificationConfig:
    points: Mapping[Difficulty, int] = field(default_factory=lambda: {
        Difficulty.EASY: 10,
        Difficulty.MEDIUM: 20,
        Difficulty.HARD: 40,
        Difficulty.EXPERT: 80,
    })
    level_step_points: int = 100  # level = floor(sqrt(points/step)) + 1
    streak_badge_days: tuple[int, ...] = (7, 30)
    solved_badge_count: int = 100


DEFAULT_GAMIFICATION = GamificationConfig()


@dataclass(frozen=True)
class LearnerState:
    learner_id: str
    points: int = 0
    level: int = 1
    streak_days: int = 0
    last_active_day: date | None = None
    badges: frozenset[str] = frozenset()
    solved: frozenset[str] = frozenset()
    per_category_mastery: Mapping[str, "MasteryRecord"] = field(default_factory=dict)


def new_learner(learner_id: str) -> LearnerState:
    return LearnerState(learner_id=learner_id)


def _utc_date(moment: datetime) -> date:
    if moment.tzinfo is None:
        return moment.date()  # naive timestamps are taken as UTC
    return moment.astimezone(timezone.utc).date()


def update_streak(state: LearnerState, event_time: datetime) -> LearnerState:
    """Advance the day streak for an activity at `event_time`.

    Same-day repeats leave the streak unchanged; the next UTC day extends it;
    any gap resets it to 1. Events dated before the last active day are
    rejected.
    """
    day = _utc_date(event_time)
    last = state.last_active_day
    if last is None:
        streak = 1
    elif day < last:
        raise OutOfOrderEvent(f"event on {day} precedes last active day {last}")
    elif day == last:
        streak = state.streak_days
    elif day == last + timedelta(days=1):
        streak = state.streak_days + 1
    else:
        streak = 1
    return replace(state, streak_days=streak, last_active_day=day)


def compute_level(points: int, config: GamificationConfig = DEFAULT_GAMIFICATION) -> int:
    """Quadratic level curve: level n needs (n-1)^2 * step points."""
    if points < 0:
        raise ValueError("points must be non-negative")
    return math.isqrt(points // config.level_step_points) + 1


def award_points(state: LearnerState, difficulty: Difficulty,
                 config: GamificationConfig = DEFAULT_GAMIFICATION) -> LearnerState:
    """Add the difficulty's point value; callers invoke this only on first solves."""
    points = state.points + config.points[difficulty]
    return replace(state, points=points, level=compute_level(points, config))


def badge_catalog(corpus: Corpus,
                  config: GamificationConfig = DEFAULT_GAMIFICATION) -> list[Badge]:
    badges = [Badge("first-solve", "First Solve", "solve any challenge")]
    for days in config.streak_badge_days:
        badges.append(Badge(f"streak-{days}", f"{days}-Day Streak",
                            f"stay active {days} days in a row"))
    badges.append(Badge(f"solved-{config.solved_badge_count}",
                        f"{config.solved_badge_count} Solved",
                        f"solve {config.solved_badge_count} distinct challenges"))
    for category in corpus.category_set:
        badges.append(Badge(f"category-complete:{category}", f"Completed {category}",
                            f"solve every challenge in {category}"))
    return badges


def _badge_earned(badge: Badge, state: LearnerState, corpus: Corpus,
                  config: GamificationConfig) -> bool:
    if badge.id == "first-solve":
        return len(state.solved) >= 1
    if badge.id.startswith("streak-"):
        return state.streak_days >= int(badge.id.split("-", 1)[1])
    if badge.id.startswith("solved-"):
        return len(state.solved) >= int(badge.id.split("-", 1)[1])
    if badge.id.startswith("category-complete:"):
        category = badge.id.split(":", 1)[1]
        ids = corpus.by_category.get(category, ())
        return bool(ids) and all(cid in state.solved for cid in ids)
    return False


def evaluate_badges(state: LearnerState, corpus: Corpus,
                    config: GamificationConfig = DEFAULT_GAMIFICATION,
                    ) -> tuple[LearnerState, list[str]]:
    """Grant every badge whose rule now holds; already-earned badges never revoke."""
    earned: list[str] = []
    for badge in badge_catalog(corpus, config):
        if badge.id not in state.badges and _badge_earned(badge, state, corpus, config):
            earned.append(badge.id)
    if not earned:
        return state, []
    return replace(state, badges=state.badges | frozenset(earned)), earned
