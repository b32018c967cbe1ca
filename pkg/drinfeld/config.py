"""
Run configuration for the command-line front end.

Config file: UTF-8 text. Lines starting with # or empty are ignored.
Every other line is ``key = value``.  Keys are the RunConfig field names
(``t_order`` and ``t-order`` are the same key).  Unknown keys are reported
and skipped; a value that does not parse stops the run with ConfigError.

Example config.txt:
  # characteristic 3, sqrt(theta) available
  p = 3
  m = 4
  prec = 120
  threshold = 0.6

Precedence: built-in defaults < config file < command-line flags.
"""

from __future__ import annotations

import dataclasses
import logging
import os
from dataclasses import dataclass
from pathlib import Path

from drinfeld.errors import ConfigError
from drinfeld.finite_field import FieldContext, FieldParams, field_make

_logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILENAME = "config.txt"


@dataclass(frozen=True)
class RunConfig:
    p: int = 3
    e: int = 1
    s: int = 2
    m: int = 4
    prec: int = 80
    t_order: int = 12
    deg_budget: int = 5
    kmax: int = 24
    detector_d: int = 6
    detector_h: int = 8
    seed: int = 0
    threads: int = 1
    threshold: float = 0.6
    out: str | None = None
    enum_budget: int = 200_000  # lattice points enumerated directly
    system_budget: int = 4_000_000  # matrix entries for the relation detector
    samples: int = 4
    gammas: int = 4

    def validate(self) -> "RunConfig":
        for name in ("e", "s", "m", "prec", "t_order", "deg_budget", "kmax", "detector_d",
                     "threads", "enum_budget", "system_budget", "samples", "gammas"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.p < 2:
            raise ConfigError(f"p must be a prime, got {self.p}")
        if self.detector_h < 0 or self.seed < 0:
            raise ConfigError("detector_h and seed must be non-negative")
        if not 0 < self.threshold <= 1:
            raise ConfigError(f"threshold is a fraction of prec in (0, 1], got {self.threshold}")
        return self

    @property
    def field_params(self) -> FieldParams:
        return FieldParams(self.p, self.e, self.s, self.m)

    def context(self) -> FieldContext:
        return field_make(self.field_params, self.prec)

    def to_json(self) -> dict:
        """Everything that determines report contents (not threads or the output path)."""
        data = dataclasses.asdict(self)
        data.pop("threads")
        data.pop("out")
        return data


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}


def get_default_config_path() -> str:
    """Return the path to the default config file."""
    return os.path.join(str(Path.home()), ".drinfeld-desk", DEFAULT_CONFIG_FILENAME)


def resolve_config_path(cli_path: str | None) -> str | None:
    """
    Resolve the config file path.

    - If *cli_path* is given: expand and return its absolute path.  Emits a
      warning when the file does not exist so the user knows the defaults apply.
    - If *cli_path* is None and ``~/.drinfeld-desk/config.txt`` exists, return it.
    - Otherwise return None (defaults only).
    """
    if cli_path:
        p = os.path.abspath(os.path.expanduser(cli_path))
        if not os.path.isfile(p):
            _logger.warning("Config file not found: %s; using defaults.", p)
        return p
    default = get_default_config_path()
    if os.path.isfile(default):
        return default
    return None


def _parse_value(name: str, text: str):
    kind = _FIELDS[name].type
    if name == "out":
        return text or None
    try:
        if "float" in str(kind):
            return float(text)
        return int(text)
    except ValueError as e:
        raise ConfigError(f"{name}: cannot parse {text!r}") from e


def parse_config_lines(lines, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines into typed overrides."""
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key = key.strip().replace("-", "_")
        if key not in _FIELDS:
            _logger.warning("%s:%d: unknown config key %r ignored", source, lineno, key)
            continue
        try:
            values[key] = _parse_value(key, value.strip())
        except ConfigError as e:
            raise ConfigError(f"{source}:{lineno}: {e}") from e
    return values


def load_config_file(path: str | None) -> dict:
    """
    Load overrides from the config file at *path*.

    Returns ``{}`` when *path* is ``None``, the file doesn't exist, or it
    cannot be read.
    """
    if not path or not os.path.isfile(path):
        return {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.readlines()
    except (OSError, UnicodeDecodeError) as e:
        _logger.warning(
            "Failed to read config from %s (%s)", path, e.__class__.__name__, exc_info=True
        )
        return {}
    return parse_config_lines(lines, path)


def build_config(file_values: dict | None = None, flag_values: dict | None = None) -> RunConfig:
    """defaults < file < flags; flags left at None do not override."""
    merged = dict(file_values or {})
    for key, value in (flag_values or {}).items():
        if value is not None:
            merged[key] = value
    unknown = set(merged) - set(_FIELDS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return dataclasses.replace(RunConfig(), **merged).validate()
