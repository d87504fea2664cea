"""Experiment configuration shared by the CLI and the acceptance suite.

Precedence: explicit flags, then the JSON file named by
PADIC_OPALG_CONFIG, then the defaults below.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError

ENV_VAR = "PADIC_OPALG_CONFIG"

DEFAULT_BUDGETS = {
    "refine": 8,
    "lift": 64,
    "teich": 40,
    "series_depth": 12,
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class ExperimentConfig:
    prime: int = 3
    precision: int = 40
    target_valuation: int = 30
    budgets: dict = field(default_factory=lambda: dict(DEFAULT_BUDGETS))
    seed: int = 0

    def __post_init__(self):
        if not _is_prime(self.prime):
            raise ParseError(f"{self.prime} is not prime")
        if self.precision < 8:
            raise ParseError("precision must be at least 8")
        if self.precision < self.target_valuation:
            raise ParseError("precision must cover the target valuation")

    def budget(self, name: str) -> int:
        return self.budgets.get(name, DEFAULT_BUDGETS[name])


def load_config(path: str | None = None, **overrides) -> ExperimentConfig:
    """Build a config honoring the flag > env-file > default order.
    Pass overrides with value None to mean "not given"."""
    data: dict = {}
    if path is None:
        path = os.environ.get(ENV_VAR)
    if path:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"config file {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ParseError(f"config file {path}: expected a JSON object")
        data.update(raw)
    data.update({k: v for k, v in overrides.items() if v is not None})
    known = {"prime", "precision", "target_valuation", "budgets", "seed"}
    unknown = set(data) - known
    if unknown:
        raise ParseError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**data)
