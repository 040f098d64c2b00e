"""Experiment configuration and seed handling."""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from typing import Optional

from ..rng import DEFAULT_SEED, GENERATOR_ID, MASK64, derive_seed

SCHEMA_VERSION = "1.0"
SEED_ENV = "MAZEROBOT_SEED"

# Artifact defaults; none of these come from the underlying theory, which
# has no finite-budget quantities.
DEFAULT_TRIALS = 200
DEFAULT_BUDGET = 10**5
DEFAULT_RADIUS = 2
# cap on (ball cells x trials) held by one coverage experiment
COVERAGE_CELL_CAP = 50_000_000
# largest checkpoint for exact position-law comparisons
DISTRIBUTION_CHECKPOINT_CAP = 60
# pre-registered acceptance thresholds
P_VALUE_THRESHOLD = 0.001
SIGMA_THRESHOLD = 3.0


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class ResourceError(MemoryError):
    """Experiment would exceed a configured resource cap."""


def resolve_seed(seed: Optional[int]) -> tuple[int, str]:
    """Master seed and where it came from: the argument, the environment, or the default."""
    if seed is not None:
        return int(seed) & MASK64, "argument"
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env.strip(), 0) & MASK64, "environment"
        except ValueError:
            raise ConfigError(f"{SEED_ENV}={env!r} is not an integer") from None
    return DEFAULT_SEED, "default"


def trial_seed(master: int, index: int) -> int:
    """Seed of trial ``index``: a fixed SplitMix64 mix of (master, index)."""
    return derive_seed(master, index)


def powers_of_ten(budget: int, include_zero: bool = True) -> list[int]:
    """Checkpoints 0, 1, 10, 100, ... up to ``budget``, plus ``budget`` itself."""
    pts = [0] if include_zero else []
    p = 1
    while p <= budget:
        pts.append(p)
        p *= 10
    if budget not in pts:
        pts.append(budget)
    return pts


@dataclass
class ExperimentConfig:
    target: str
    budget: int = DEFAULT_BUDGET
    trials: int = DEFAULT_TRIALS
    radius: int = DEFAULT_RADIUS
    seed: Optional[int] = None
    mode: str = "float"
    out: Optional[str] = None
    extra: dict = field(default_factory=dict)
    seed_source: str = field(init=False, default="")

    def __post_init__(self):
        self.seed, self.seed_source = resolve_seed(self.seed)
        if self.budget < 0:
            raise ConfigError("budget must be >= 0")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.radius < 0:
            raise ConfigError("radius must be >= 0")
        if self.mode not in ("rational", "float"):
            raise ConfigError("mode must be 'rational' or 'float'")

    def trial_seed(self, index: int) -> int:
        return trial_seed(self.seed, index)

    def echo(self) -> dict:
        d = asdict(self)
        d["generator"] = GENERATOR_ID
        d.pop("out")
        return d
