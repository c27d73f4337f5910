"""Run configuration: `key = value` files with command-line overrides."""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from .lattice import ConfigurationError

__all__ = ["RunConfig", "parse_config", "render_config"]

_REQUIRED = ("lx", "ly", "beta", "g")
_INT_KEYS = ("lx", "ly", "isteps", "nbins", "mstep", "seed", "thin")
_FLOAT_KEYS = ("beta", "g")
_STR_KEYS = ("init", "pattern", "msnorm", "out_dir")


@dataclass
class RunConfig:
    lx: int
    ly: int
    beta: float
    g: float
    isteps: int = 0  # 0 = size-scaled default, resolved in __post_init__
    nbins: int = 20
    mstep: int = 1000
    seed: int = 1
    thin: int = 1
    init: str = "random"
    pattern: str = "default"
    msnorm: str = "per_sublattice"
    out_dir: str = "."
    stream: int = field(default=0, repr=False)  # RNG sub-stream, set by sweep

    def __post_init__(self):
        if self.isteps == 0:
            self.isteps = 1000 * self.lx * self.ly
        self.validate()

    def validate(self) -> None:
        if self.beta <= 0:
            raise ConfigurationError(f"beta must be positive, got {self.beta}")
        if self.g < 0:
            raise ConfigurationError(f"g must be non-negative, got {self.g}")
        for key in ("isteps", "nbins", "mstep", "thin"):
            if getattr(self, key) < 1:
                raise ConfigurationError(f"{key} must be a positive integer")
        if self.nbins < 2:
            raise ConfigurationError("nbins must be at least 2 for error estimates")
        if not -(2**63) <= self.seed < 2**64:
            raise ConfigurationError("seed must fit in 64 bits")
        if self.pattern not in ("default", "ferro"):
            raise ConfigurationError(f"unknown pattern {self.pattern!r}")
        if self.msnorm not in ("per_sublattice", "literal"):
            raise ConfigurationError(f"unknown msnorm {self.msnorm!r}")
        if self.init != "random" and not self.init.startswith("file:"):
            raise ConfigurationError("init must be 'random' or 'file:PATH'")

    def with_point(self, g: float, stream: int) -> "RunConfig":
        return replace(self, g=g, stream=stream)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Parse `key = value` lines; `#` comments and blanks ignored.

    Overrides (e.g. from command-line flags) take precedence over file
    values.  Unknown and missing-required keys are errors.
    """
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key in _INT_KEYS:
            try:
                values[key] = int(val)
            except ValueError:
                raise ConfigurationError(f"line {lineno}: {key} needs an integer, got {val!r}")
        elif key in _FLOAT_KEYS:
            try:
                values[key] = float(val)
            except ValueError:
                raise ConfigurationError(f"line {lineno}: {key} needs a number, got {val!r}")
        elif key in _STR_KEYS:
            values[key] = val
        else:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
    if overrides:
        for key, val in overrides.items():
            if val is not None:
                values[key] = val
    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ConfigurationError(f"missing required keys: {', '.join(missing)}")
    return RunConfig(**values)


def render_config(config: RunConfig) -> str:
    """Config-file text that parses back to an equal RunConfig."""
    lines = []
    for key in _INT_KEYS + _FLOAT_KEYS + _STR_KEYS:
        lines.append(f"{key} = {getattr(config, key)}")
    return "\n".join(lines) + "\n"
