"""Run configuration: defaults, a `key = value` file, then flags."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any

CACHE_ENV = "MGW_CACHE_DIR"

# not part of the result, so left out of the echo
_UNECHOED = ("cache_dir", "threads")


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    cache_dir: str | None = None
    threads: int = 1
    seed: int = 20240601
    vertex_cap: int = 2_000_000
    order_budget: int = 10**6
    index_witness_length: int = 8
    closure_budget: int = 20_000
    stability: int = 3
    approximant_cap: int = 12
    resolution_cap: int = 12

    def validate(self) -> Config:
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name in ("cache_dir", "seed"):
                continue
            if not isinstance(v, int) or v < 1:
                raise ConfigError(f"{f.name} must be a positive integer, got {v!r}")
        if self.stability < 2:
            raise ConfigError("stability must be at least 2")
        return self

    def echo(self) -> dict[str, Any]:
        return {k: v for k, v in asdict(self).items() if k not in _UNECHOED}

    def update(self, **values: Any) -> Config:
        for k, v in values.items():
            if v is not None:
                setattr(self, k, v)
        return self


def _coerce(name: str, raw: str) -> Any:
    if name == "cache_dir":
        return raw
    try:
        return int(raw.replace("_", ""))
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from None


def parse_config_text(text: str, source: str = "<config>") -> dict[str, Any]:
    known = {f.name for f in fields(Config)}
    out: dict[str, Any] = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{source}:{n}: unknown key {key!r}")
        out[key] = _coerce(key, raw)
    return out


def load_config(path: str | os.PathLike | None = None, **overrides: Any) -> Config:
    """Defaults, then the file, then MGW_CACHE_DIR, then explicit overrides."""
    cfg = Config()
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
        cfg.update(**parse_config_text(text, str(p)))
    env = os.environ.get(CACHE_ENV)
    if env:
        cfg.cache_dir = env
    cfg.update(**overrides)
    return cfg.validate()
