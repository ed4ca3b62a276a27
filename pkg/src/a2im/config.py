from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from typing import Mapping

from .generate import DEFAULT_MAX_N
from .immersion import SearchBudget

ENV_PREFIX = "A2IM_"

# Config field -> environment variable suffix.
_ENV_FIELDS = {
    "jobs": "JOBS",
    "seed": "SEED",
    "budget_nodes": "BUDGET_NODES",
    "budget_ms": "BUDGET_MS",
    "max_enumeration_n": "MAX_N",
}


class ConfigError(ValueError):
    code = "config"


@dataclass(frozen=True)
class HarnessConfig:
    jobs: int = 1
    seed: int = 0
    budget_nodes: int | None = 5_000_000
    budget_ms: int | None = 120_000
    max_enumeration_n: int = DEFAULT_MAX_N
    timings: bool = False
    full_audit: bool = False

    def __post_init__(self):
        if self.jobs < 1:
            raise ConfigError(f"jobs must be at least 1, got {self.jobs}")
        for name in ("budget_nodes", "budget_ms"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ConfigError(f"{name} must be positive, got {value}")

    @property
    def budget(self) -> SearchBudget:
        return SearchBudget(self.budget_nodes, self.budget_ms)

    def echo(self) -> dict:
        """The part of the config that shapes results, as stored in reports."""
        return {
            "seed": self.seed,
            "budget_nodes": self.budget_nodes,
            "budget_ms": self.budget_ms,
            "max_enumeration_n": self.max_enumeration_n,
            "full_audit": self.full_audit,
        }

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None) -> HarnessConfig:
        environ = os.environ if environ is None else environ
        values = {}
        for name, suffix in _ENV_FIELDS.items():
            raw = environ.get(ENV_PREFIX + suffix)
            if raw is None or raw == "":
                continue
            values[name] = _parse_int(ENV_PREFIX + suffix, raw, nullable=name.startswith("budget_"))
        return cls(**values)

    def override(self, **changes) -> HarnessConfig:
        """Apply CLI values; ``None`` means the flag was not given."""
        known = {f.name for f in fields(self)}
        unknown = set(changes) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {', '.join(sorted(unknown))}")
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def _parse_int(name: str, raw: str, nullable: bool) -> int | None:
    if nullable and raw.strip().lower() in {"none", "off", "unlimited"}:
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{name}={raw!r} is not an integer") from exc
