"""Challenge variant generation and validation.

Difficulty scaling and cross-mode adaptation run through a pluggable
generator provider; without one, fixed templates produce deterministic
variants. Generated items pass static checks plus an embedding-based
semantic self-check before entering a corpus.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, replace
from typing import Mapping, Protocol

import requests

from .corpus import BloomLevel, Challenge, Corpus, Difficulty
from .errors import ProviderFailure
from .similarity import EmbeddingProvider, cosine

CONCEPT_PRESERVATION_THRESHOLD = 0.5  # permissive: rewrites legitimately drift

PROBLEM_LENGTH_RANGE = (20, 5000)
ANSWER_LENGTH_RANGE = (1, 5000)

_PLACEHOLDER_RE = re.compile(r"\{\{.*?\}\}", re.DOTALL)


class Mode(enum.Enum):
    CODING = "coding"
    SIMULATION = "simulation"
    DEBUGGING = "debugging"
    VIVA = "viva"


class Transform(enum.Enum):
    DIFFICULTY_SCALE = "DifficultyScale"
    MODE_ADAPT = "ModeAdapt"
    PARAPHRASE = "Paraphrase"


@dataclass(frozen=True)
class GeneratedChallenge:
    challenge: Challenge
    source_id: str
    transform: Transform
    provider_name: str


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationVerdict:
    passed: bool
    checks: tuple[CheckResult, ...]

    @classmethod
    def from_checks(cls, checks: list[CheckResult]) -> "ValidationVerdict":
        return cls(passed=all(c.passed for c in checks), checks=tuple(checks))


class GeneratorProvider(Protocol):
    name: str

    def generate(self, instruction: str, challenge: Challenge) -> tuple[str, str]:
        """Return (problem, answer) candidate texts; raise ProviderFailure on error."""
        ...


class HttpGeneratorProvider:
    """Generation over HTTP: POST {instruction, problem, answer} -> {problem, answer}."""

    def __init__(self, url: str, name: str = "http-generator", timeout: float = 30.0):
        self.url = url
        self.name = name
        self.timeout = timeout

    def generate(self, instruction: str, challenge: Challenge) -> tuple[str, str]:
        payload = {
            "instruction": instruction,
            "problem": challenge.problem,
            "answer": challenge.answer,
        }
        last_error: Exception | None = None
        for _ in range(2):
            try:
                response = requests.post(self.url, json=payload, timeout=self.timeout)
                response.raise_for_status()
                body = response.json()
                problem, answer = body["problem"], body["answer"]
                break
            except Exception as exc:  # noqa: BLE001
                last_error = exc
        else:
            raise ProviderFailure(f"generator service failed after retry: {last_error}")
        if not str(problem).strip() or not str(answer).strip():
            raise ProviderFailure("generator returned empty text")
        return str(problem), str(answer)


# Fixed difficulty framing: (preamble, constraint suffix) per target level.
DIFFICULTY_FRAMES: Mapping[Difficulty, tuple[str, str]] = {
    Difficulty.EASY: (
        "Warm-up variant: ",
        " Keep your reasoning to the single most important idea, in one or two sentences.",
    ),
    Difficulty.MEDIUM: (
        "Standard variant: ",
        " Justify each step of your reasoning briefly.",
    ),
    Difficulty.HARD: (
        "Advanced variant: ",
        " Address at least one edge case or failure mode, and state your assumptions.",
    ),
    Difficulty.EXPERT: (
        "Expert variant: ",
        " Analyze trade-offs rigorously, cover degenerate inputs, and argue why "
        "alternative approaches fall short.",
    ),
}

VIVA_FRAME = "Viva voce: explain aloud, as if to an examiner. "

MODE_TEMPLATES: Mapping[Mode, str] = {
    Mode.CODING: ("Write a short program or pseudocode that demonstrates the following, "
                  "then explain what it shows. {problem}"),
    Mode.SIMULATION: ("Design a small experiment or simulation to investigate the following, "
                      "including what you would measure and vary. {problem}"),
    Mode.DEBUGGING: ("A study partner claims: \"{answer_head}\" — but something about that claim "
                     "is off. Critique it against the original question. {problem}"),
    Mode.VIVA: VIVA_FRAME + "{problem}",
}


def _first_sentence(text: str, limit: int = 160) -> str:
    head = text.strip().split(". ")[0].strip()
    return head[:limit]


def scale_difficulty(base: Challenge, target: Difficulty,
                     provider: GeneratorProvider | None = None,
                     fallback: bool = True) -> GeneratedChallenge:
    """Produce a variant of `base` at a different difficulty level.

    Category, tags and Bloom level carry over; the id gains a -d{rank}
    suffix. Without a provider (or when one fails and fallback is allowed)
    the fixed per-level framing wraps the original problem text.
    """
    if target == base.difficulty:
        raise ValueError("target difficulty must differ from the base difficulty")

    provider_name = "template"
    problem = answer = None
    if provider is not None:
        try:
            problem, answer = provider.generate(
                f"Rewrite this challenge at {target.value} difficulty, preserving its concept.",
                base)
            provider_name = provider.name
        except ProviderFailure:
            if not fallback:
                raise
    if problem is None:
        preamble, suffix = DIFFICULTY_FRAMES[target]
        problem = preamble + base.problem + suffix
        answer = base.answer

    return GeneratedChallenge(
        challenge=replace(base, id=f"{base.id}-d{target.rank}",
                          problem=problem, answer=answer, difficulty=target),
        source_id=base.id,
        transform=Transform.DIFFICULTY_SCALE,
        provider_name=provider_name,
    )


def adapt_mode(base: Challenge, mode: Mode,
               provider: GeneratorProvider | None = None,
               fallback: bool = True) -> GeneratedChallenge:
    """Recast `base` into a coding/simulation/debugging/viva task format.

    Labels carry over, tags gain the mode name, and the id gains a -m{mode}
    suffix.
    """
    provider_name = "template"
    problem = answer = None
    if provider is not None:
        try:
            problem, answer = provider.generate(
                f"Adapt this challenge into a {mode.value}-style task, preserving its concept.",
                base)
            provider_name = provider.name
        except ProviderFailure:
            if not fallback:
                raise
    if problem is None:
        problem = MODE_TEMPLATES[mode].format(
            problem=base.problem, answer_head=_first_sentence(base.answer))
        if mode is Mode.DEBUGGING:
            answer = f"The claim misstates the concept. {base.answer}"
        else:
            answer = base.answer

    tags = base.tags if mode.value in base.tags else base.tags + (mode.value,)
    return GeneratedChallenge(
        challenge=replace(base, id=f"{base.id}-m{mode.value}",
                          problem=problem, answer=answer, tags=tags),
        source_id=base.id,
        transform=Transform.MODE_ADAPT,
        provider_name=provider_name,
    )


def static_validate(gc: GeneratedChallenge) -> ValidationVerdict:
    """Syntactic gate: schema, lengths, balanced code fences, no stray placeholders."""
    c = gc.challenge
    checks = []

    schema_ok = bool(c.id.strip() and c.problem.strip() and c.answer.strip()
                     and c.category.strip())
    checks.append(CheckResult("schema", schema_ok,
                              "all schema fields present and non-empty" if schema_ok
                              else "a required field is empty"))

    lo, hi = PROBLEM_LENGTH_RANGE
    plen = len(c.problem)
    checks.append(CheckResult("problem_length", lo <= plen <= hi,
                              f"problem length {plen} chars (allowed {lo}..{hi})"))

    lo, hi = ANSWER_LENGTH_RANGE
    alen = len(c.answer)
    checks.append(CheckResult("answer_length", lo <= alen <= hi,
                              f"answer length {alen} chars (allowed {lo}..{hi})"))

    fences_ok = c.problem.count("```") % 2 == 0 and c.answer.count("```") % 2 == 0
    checks.append(CheckResult("code_fences", fences_ok,
                              "``` markers balanced" if fences_ok
                              else "unbalanced ``` marker"))

    stray = _PLACEHOLDER_RE.search(c.problem) or _PLACEHOLDER_RE.search(c.answer)
    checks.append(CheckResult("placeholders", stray is None,
                              "no unresolved template placeholders" if stray is None
                              else f"unresolved placeholder {stray.group(0)!r}"))

    return ValidationVerdict.from_checks(checks)


def _labels_preserved(gc: GeneratedChallenge, base: Challenge) -> tuple[bool, str]:
    c = gc.challenge
    if gc.transform is Transform.DIFFICULTY_SCALE:
        ok = (c.category == base.category and c.bloom_level == base.bloom_level
              and c.tags == base.tags)
        return ok, "category/bloom/tags must carry over unchanged"
    if gc.transform is Transform.MODE_ADAPT:
        ok = (c.category == base.category and c.bloom_level == base.bloom_level
              and c.difficulty == base.difficulty and set(c.tags) >= set(base.tags))
        return ok, "all labels carry over; tags may only grow"
    ok = (c.category == base.category and c.bloom_level == base.bloom_level
          and c.difficulty == base.difficulty and c.tags == base.tags)
    return ok, "paraphrase must not change any label"


def self_check(gc: GeneratedChallenge, base: Challenge,
               provider: EmbeddingProvider,
               threshold: float = CONCEPT_PRESERVATION_THRESHOLD) -> ValidationVerdict:
    """Semantic-consistency gate: concept preservation plus label discipline."""
    if gc.source_id != base.id:
        raise ValueError(f"generated challenge traces to {gc.source_id!r}, not {base.id!r}")

    similarity = cosine(provider.embed(gc.challenge.problem), provider.embed(base.problem))
    checks = [CheckResult("concept_preservation", similarity >= threshold,
                          f"problem similarity {similarity:.3f} (threshold {threshold})")]

    labels_ok, detail = _labels_preserved(gc, base)
    checks.append(CheckResult("labels_preserved", labels_ok, detail))
    return ValidationVerdict.from_checks(checks)


def provider_critique(gc: GeneratedChallenge, base: Challenge,
                      provider: GeneratorProvider) -> str:
    """Advisory free-text critique from a generator provider; never gates."""
    problem, answer = provider.generate(
        "Critique whether this variant still tests the same concept as the original; "
        "reply with a short critique as the problem text.",
        replace(base, problem=gc.challenge.problem, answer=gc.challenge.answer))
    return problem if problem.strip() else answer


def bloom_coverage(corpus: Corpus, minimum_per_level: int) -> dict:
    """Corpus-level rubric alignment: per-Bloom counts against a minimum quota."""
    counts = {level.value: 0 for level in BloomLevel}
    for challenge in corpus.challenges:
        counts[challenge.bloom_level.value] += 1
    return {
        "minimum_per_level": minimum_per_level,
        "counts": counts,
        "levels_below_quota": [name for name, n in counts.items() if n < minimum_per_level],
    }
