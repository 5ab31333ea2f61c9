"""Deployment configuration: one JSON file plus ANVESHANA_* env overrides.

Every tunable the engine exposes (point values, mastery constants, grading
thresholds, provider URLs, listen address) lives here so deployments retune
behavior without code changes.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Mapping

from .adaptive import AdaptiveConfig
from .corpus import Difficulty
from .gamification import GamificationConfig
from .similarity import HashedTfEmbedder, HttpEmbeddingProvider


@dataclass(frozen=True)
class PlatformConfig:
    listen_host: str = "127.0.0.1"
    listen_port: int = 8000
    admin_token: str = "change-me-admin"
    data_dir: str = "data"
    embedding_url: str | None = None
    generator_url: str | None = None
    provider_timeout_s: float = 10.0
    featured_challenge_ids: tuple[str, ...] = ()
    points: Mapping[str, int] = field(default_factory=lambda: {
        "Easy": 10, "Medium": 20, "Hard": 40, "Expert": 80,
    })
    level_step_points: int = 100
    streak_badge_days: tuple[int, ...] = (7, 30)
    solved_badge_count: int = 100
    alpha: float = 0.3
    initial_mastery: float = 0.25
    semantic_threshold: float = 0.75
    self_check_threshold: float = 0.5
    band_bounds: tuple[float, float, float] = (0.4, 0.65, 0.85)

    def gamification(self) -> GamificationConfig:
        return GamificationConfig(
            points={Difficulty.parse(name): value for name, value in self.points.items()},
            level_step_points=self.level_step_points,
            streak_badge_days=tuple(self.streak_badge_days),
            solved_badge_count=self.solved_badge_count,
        )

    def adaptive(self) -> AdaptiveConfig:
        return AdaptiveConfig(
            alpha=self.alpha,
            initial_mastery=self.initial_mastery,
            semantic_threshold=self.semantic_threshold,
            band_bounds=tuple(self.band_bounds),
        )

    def build_embedder(self):
        if self.embedding_url:
            return HttpEmbeddingProvider(self.embedding_url, timeout=self.provider_timeout_s)
        return HashedTfEmbedder()


# Documented environment overrides; values are coerced to the field's type.
ENV_OVERRIDES = {
    "ANVESHANA_LISTEN_HOST": "listen_host",
    "ANVESHANA_LISTEN_PORT": "listen_port",
    "ANVESHANA_ADMIN_TOKEN": "admin_token",
    "ANVESHANA_DATA_DIR": "data_dir",
    "ANVESHANA_EMBEDDING_URL": "embedding_url",
    "ANVESHANA_GENERATOR_URL": "generator_url",
    "ANVESHANA_PROVIDER_TIMEOUT_S": "provider_timeout_s",
    "ANVESHANA_ALPHA": "alpha",
    "ANVESHANA_INITIAL_MASTERY": "initial_mastery",
    "ANVESHANA_SEMANTIC_THRESHOLD": "semantic_threshold",
    "ANVESHANA_SELF_CHECK_THRESHOLD": "self_check_threshold",
    "ANVESHANA_LEVEL_STEP_POINTS": "level_step_points",
    "ANVESHANA_SOLVED_BADGE_COUNT": "solved_badge_count",
}

_TUPLE_FIELDS = {"featured_challenge_ids", "streak_badge_days", "band_bounds"}


def load_config(path: str | Path | None = None,
                env: Mapping[str, str] = os.environ) -> PlatformConfig:
    """Read the config file (if given), then apply environment overrides."""
    values: dict = {}
    if path is not None:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        known = {f.name for f in fields(PlatformConfig)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        values.update(raw)

    types = {f.name: f.type for f in fields(PlatformConfig)}
    for var, name in ENV_OVERRIDES.items():
        if var in env:
            text = env[var]
            if types[name] == "int":
                values[name] = int(text)
            elif types[name] == "float":
                values[name] = float(text)
            else:
                values[name] = text

    for name in _TUPLE_FIELDS & set(values):
        values[name] = tuple(values[name])
    return PlatformConfig(**values)
