"""Run configuration shared by the library and the command line.

Resolution order is: explicit argument > environment variable > JSON config
file > built-in default.
"""
from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

ENV_PRECISION = "CRANKSCOPE_PRECISION_BITS"
ENV_CACHE_DIR = "CRANKSCOPE_CACHE_DIR"
ENV_CONFIG = "CRANKSCOPE_CONFIG"

DEFAULT_PRECISION_BITS = 256
DEFAULT_TRUNCATION_LIMIT = 1000
DEFAULT_ENUMERATION_LIMIT = 60


def _default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "crankscope"


@dataclass
class RunConfig:
    precision_bits: int = DEFAULT_PRECISION_BITS
    truncation_limit: int = DEFAULT_TRUNCATION_LIMIT
    enumeration_limit: int = DEFAULT_ENUMERATION_LIMIT
    cache_dir: Path | None = field(default_factory=_default_cache_dir)
    output_format: str = "csv"
    tolerances: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError(f"precision_bits must be >= 64, got {self.precision_bits}")
        if self.truncation_limit < 1:
            raise ValueError(f"truncation_limit must be >= 1, got {self.truncation_limit}")
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"output_format must be 'csv' or 'json', got {self.output_format!r}")
        if self.cache_dir is not None:
            self.cache_dir = Path(self.cache_dir)

    def tolerance(self, name: str, default: float) -> float:
        return float(self.tolerances.get(name, default))

    @classmethod
    def resolve(cls, config_file: str | os.PathLike | None = None, **overrides) -> "RunConfig":
        """Build a config honouring flag > env > file > default precedence.

        ``overrides`` whose value is None are treated as "not given".
        """
        values: dict = {}
        path = config_file or os.environ.get(ENV_CONFIG)
        if path:
            with open(path) as fh:
                data = json.load(fh)
            known = {f.name for f in dataclasses.fields(cls)}
            unknown = set(data) - known
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
            values.update(data)
        if ENV_PRECISION in os.environ:
            values["precision_bits"] = int(os.environ[ENV_PRECISION])
        if ENV_CACHE_DIR in os.environ:
            values["cache_dir"] = os.environ[ENV_CACHE_DIR] or None
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


_active: RunConfig | None = None


def get_config() -> RunConfig:
    global _active
    if _active is None:
        _active = RunConfig.resolve()
    return _active


def set_config(cfg: RunConfig | None) -> None:
    """Install ``cfg`` as the process-wide config (None re-reads the environment)."""
    global _active
    _active = cfg
