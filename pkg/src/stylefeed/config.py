"""Configuration for the feedback engine: rule thresholds, experiment weights, schedules.

Everything tunable lives here as frozen dataclasses; the CLI and service load
overrides from a JSON config file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path


class InvalidWeights(ValueError):
    """Group weights are malformed (out of range or do not sum to 1)."""


WEIGHT_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class GroupWeights:
    """Fractions of the cohort assigned to each experiment group."""

    delay: float = 0.10
    realtime: float = 0.45
    nudge: float = 0.45

    def __post_init__(self):
        for name, value in (("delay", self.delay), ("realtime", self.realtime), ("nudge", self.nudge)):
            if not 0.0 <= value <= 1.0:
                raise InvalidWeights(f"{name} weight {value} outside [0, 1]")
        total = self.delay + self.realtime + self.nudge
        if abs(total - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise InvalidWeights(f"weights sum to {total}, expected 1")


@dataclass(frozen=True)
class RuleConfig:
    """Thresholds for the deterministic style rules."""

    exempt_numbers: frozenset[float] = frozenset({0.0, 1.0, -1.0})
    # LongFunction fires strictly above this many body lines.
    long_function_max_lines: int = 15
    # DuplicateBlock fires at runs of at least this many identical lines.
    duplicate_min_run: int = 5
    max_findings_per_category: int = 10


@dataclass(frozen=True)
class ReleaseSchedule:
    """Weekly release instant for the Delay group (weekday 0 = Monday)."""

    weekday: int = 0
    hour: int = 0
    minute: int = 0
    timezone: str = "UTC"

    def __post_init__(self):
        if not 0 <= self.weekday <= 6:
            raise ValueError(f"weekday {self.weekday} outside 0..6")
        if not 0 <= self.hour <= 23 or not 0 <= self.minute <= 59:
            raise ValueError("release time out of range")


@dataclass(frozen=True)
class EngineConfig:
    weights: GroupWeights = field(default_factory=GroupWeights)
    seed: int = 0
    cooldown_seconds: int = 600
    release: ReleaseSchedule = field(default_factory=ReleaseSchedule)
    transport: str = "mock"
    rules: RuleConfig = field(default_factory=RuleConfig)
    # Identifier items with score <= threshold (or a misleading name) become visible.
    surface_threshold: int = 6
    max_retries: int = 2
    request_timeout: float = 30.0


class ConfigError(ValueError):
    """Config file is unreadable or contains invalid values."""


def load_config(path: str | Path | None = None) -> EngineConfig:
    """Build an EngineConfig, overlaying values from a JSON file when given."""
    config = EngineConfig()
    if path is None:
        return config
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot load config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    try:
        if "weights" in raw:
            config = replace(config, weights=GroupWeights(**raw["weights"]))
        if "release" in raw:
            config = replace(config, release=ReleaseSchedule(**raw["release"]))
        if "rules" in raw:
            rules = dict(raw["rules"])
            if "exempt_numbers" in rules:
                rules["exempt_numbers"] = frozenset(float(x) for x in rules["exempt_numbers"])
            config = replace(config, rules=RuleConfig(**rules))
        for key in ("seed", "cooldown_seconds", "transport", "surface_threshold",
                    "max_retries", "request_timeout"):
            if key in raw:
                config = replace(config, **{key: raw[key]})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc
    return config
