"""Submission grading and next-challenge selection.

Grading normalizes free-text answers and accepts either an exact match or a
semantic match above a strict cosine threshold. Selection follows a
per-category mastery score (exponentially weighted success rate) mapped to a
difficulty band, with deterministic hash-based tie-breaking so the same
learner state always yields the same recommendation.
"""

from __future__ import annotations

import enum
import hashlib
import re
from dataclasses import dataclass, replace
from typing import Sequence

from .corpus import Challenge, Corpus, Difficulty
from .errors import ProviderFailure, UnknownCategory
from .gamification import LearnerState, Outcome
from .similarity import EmbeddingProvider, cosine

_WHITESPACE_RE = re.compile(r"\s+")
_TERMINAL_PUNCTUATION = ".,;:!?"


@dataclass(frozen=True)
class AdaptiveConfig:
    alpha: float = 0.3               # EWMA weight of the newest outcome
    initial_mastery: float = 0.25
    semantic_threshold: float = 0.75  # stricter than the augmentation self-check
    band_bounds: tuple[float, float, float] = (0.4, 0.65, 0.85)


DEFAULT_ADAPTIVE = AdaptiveConfig()


@dataclass(frozen=True)
class MasteryRecord:
    category: str
    mastery: float
    attempts: int = 0


class GradeMethod(enum.Enum):
    EXACT_MATCH = "ExactMatch"
    SEMANTIC_MATCH = "SemanticMatch"


@dataclass(frozen=True)
class GradeResult:
    correct: bool
    method: GradeMethod
    similarity: float | None
    first_solve: bool = False
    points_awarded: int = 0

    def as_dict(self) -> dict:
        return {
            "correct": self.correct,
            "method": self.method.value,
            "similarity": self.similarity,
            "first_solve": self.first_solve,
            "points_awarded": self.points_awarded,
        }


def normalize_answer(text: str) -> str:
    """Trim, collapse whitespace, lowercase, and drop terminal punctuation."""
    collapsed = _WHITESPACE_RE.sub(" ", text.strip()).lower()
    return collapsed.rstrip(_TERMINAL_PUNCTUATION).rstrip()


def grade(challenge: Challenge, submitted: str, provider: EmbeddingProvider,
          config: AdaptiveConfig = DEFAULT_ADAPTIVE) -> GradeResult:
    """Grade one submission against the challenge's reference answer.

    Exact match after normalization wins outright; otherwise the two texts
    are embedded and compared against the semantic threshold. If the
    embedding provider fails, grading degrades to exact-match only, which
    the result's method records.
    """
    expected = normalize_answer(challenge.answer)
    got = normalize_answer(submitted)
    if got == expected:
        return GradeResult(correct=True, method=GradeMethod.EXACT_MATCH, similarity=None)
    try:
        similarity = cosine(provider.embed(got), provider.embed(expected))
    except ProviderFailure:
        return GradeResult(correct=False, method=GradeMethod.EXACT_MATCH, similarity=None)
    return GradeResult(correct=similarity >= config.semantic_threshold,
                       method=GradeMethod.SEMANTIC_MATCH, similarity=similarity)


def update_mastery(record: MasteryRecord, outcome: Outcome,
                   config: AdaptiveConfig = DEFAULT_ADAPTIVE) -> MasteryRecord:
    """EWMA update: m' = (1 - alpha) * m + alpha * [outcome is correct]."""
    signal = 1.0 if outcome is Outcome.CORRECT else 0.0
    mastery = (1.0 - config.alpha) * record.mastery + config.alpha * signal
    return replace(record, mastery=min(1.0, max(0.0, mastery)), attempts=record.attempts + 1)


def difficulty_band(mastery: float, config: AdaptiveConfig = DEFAULT_ADAPTIVE) -> Difficulty:
    """Map a mastery value onto the difficulty level served next."""
    if not 0.0 <= mastery <= 1.0:
        raise ValueError(f"mastery must be in [0, 1], got {mastery}")
    low, mid, high = config.band_bounds
    if mastery < low:
        return Difficulty.EASY
    if mastery < mid:
        return Difficulty.MEDIUM
    if mastery < high:
        return Difficulty.HARD
    return Difficulty.EXPERT


def selection_key(seed: int, challenge_id: str) -> int:
    """Stable, platform-independent ranking key for candidate challenges."""
    digest = hashlib.blake2b(f"{seed}\x1f{challenge_id}".encode("utf-8"),
                             digest_size=8).digest()
    return int.from_bytes(digest, "big")


def learner_seed(learner_id: str) -> int:
    return int.from_bytes(hashlib.blake2b(learner_id.encode("utf-8"),
                                          digest_size=8).digest(), "big")


def _band_preference(band: Difficulty) -> Sequence[Difficulty]:
    """All difficulties by distance from the band; ties prefer the lower rank."""
    return sorted(Difficulty, key=lambda d: (abs(d.rank - band.rank), d.rank))


def mastery_for(state: LearnerState, category: str,
                config: AdaptiveConfig = DEFAULT_ADAPTIVE) -> MasteryRecord:
    record = state.per_category_mastery.get(category)
    if record is None:
        return MasteryRecord(category=category, mastery=config.initial_mastery)
    return record


def select_next(corpus: Corpus, state: LearnerState, category: str, seed: int,
                config: AdaptiveConfig = DEFAULT_ADAPTIVE) -> Challenge | None:
    """Pick the learner's next unsolved challenge in a category.

    Candidates come from the mastery band's difficulty, widening to the
    nearest band when that one is exhausted. Returns None only when the
    learner has solved the whole category.
    """
    if category not in corpus.by_category:
        raise UnknownCategory(f"no such category: {category!r}")

    unsolved = [corpus.by_id[cid] for cid in corpus.by_category[category]
                if cid not in state.solved]
    if not unsolved:
        return None

    band = difficulty_band(mastery_for(state, category, config).mastery, config)
    for difficulty in _band_preference(band):
        candidates = [c for c in unsolved if c.difficulty == difficulty]
        if candidates:
            return min(candidates, key=lambda c: selection_key(seed, c.id))
    return None  # unreachable: unsolved is non-empty
