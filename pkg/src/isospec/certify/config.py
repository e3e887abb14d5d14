"""Run configuration for a certification, with validation."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

DEFAULT_MU = ((1, 0), (0, 1), (1, 1), (2, -1))


class ConfigError(ValueError):
    pass


def parse_mu(text: str) -> tuple[tuple[int, int], ...]:
    """Parse ``"1,0;0,1;1,1;2,-1"`` into integer pairs."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.split(",")
        if len(parts) != 2:
            raise ConfigError(f"mu entry {chunk!r} is not a pair 'a,b'")
        try:
            out.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ConfigError(f"mu entry {chunk!r} is not a pair of integers") from None
    if not out:
        raise ConfigError("mu list is empty")
    return tuple(out)


@dataclass(frozen=True)
class Config:
    t: float
    tprime: float
    n: int = 4
    mu: tuple[tuple[int, int], ...] = DEFAULT_MU
    samples: int = 100
    seed: int = 42
    heatprobe: bool = False
    mc_samples: int = 20000

    def __post_init__(self):
        for name in ("t", "tprime"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"{name} must be a finite number, got {v!r}")
            object.__setattr__(self, name, float(v))
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 4:
            raise ConfigError(f"n must be an integer >= 4, got {self.n!r}")
        mu = self.mu
        if isinstance(mu, str):
            mu = parse_mu(mu)
        try:
            mu = tuple((int(a), int(b)) for a, b in mu)
        except (TypeError, ValueError):
            raise ConfigError(f"mu must be a list of integer pairs, got {self.mu!r}") from None
        if not mu or any(a == 0 and b == 0 for a, b in mu):
            raise ConfigError("mu must be a non-empty list of non-zero integer pairs")
        object.__setattr__(self, "mu", mu)
        if isinstance(self.samples, bool) or not isinstance(self.samples, int) or self.samples < 1:
            raise ConfigError(f"samples must be a positive integer, got {self.samples!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        if isinstance(self.mc_samples, bool) or not isinstance(self.mc_samples, int) or self.mc_samples < 2:
            raise ConfigError(f"mc_samples must be an integer >= 2, got {self.mc_samples!r}")
        object.__setattr__(self, "heatprobe", bool(self.heatprobe))

    def to_json(self) -> dict:
        d = asdict(self)
        d["mu"] = [list(m) for m in self.mu]
        return d

    @classmethod
    def from_json(cls, obj: dict) -> "Config":
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"t", "tprime"} - set(obj)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        return cls(**obj)


def load_config(path: str | Path) -> dict:
    """Raw config dictionary from a JSON file."""
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return obj
