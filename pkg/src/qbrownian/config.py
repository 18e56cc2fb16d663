"""Flat key = value run configuration shared by all CLI subcommands.

The format is deliberately dumb: one `key = value` per line, `#` starts a
comment, no sections, no nesting.  Every key is checked against the schema
below, so a typo fails loudly with the list of valid keys instead of
silently falling back to a default.

Precedence: command-line flags beat file values beat built-in defaults.
An empty file (or no file) yields the default fixture in natural units
(alpha=10, gamma=0.1, omega=1, T=100, hbar=k=m=1).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ConfigError, DomainError
from .params import OccupationModel, PhysicalParams

_MODEL_FORM = "one of exact, high_t, uniform"

# key -> (converter name, human-readable expected form); the single source
# of truth for what may appear in a file or as an override
_SCHEMA = {
    "m": ("float", "positive number (oscillator mass)"),
    "omega": ("float", "positive number (oscillator frequency)"),
    "gamma": ("float", "positive number (damping rate)"),
    "alpha": ("float", "positive number (bath cutoff)"),
    "T": ("float", "number >= 0 (temperature)"),
    "hbar": ("float", "positive number"),
    "k": ("float", "positive number (Boltzmann constant)"),
    "model": ("model", _MODEL_FORM),
    "violation_model": ("model", _MODEL_FORM),
    "positivity_model": ("model", _MODEL_FORM),
    "grid_kind": ("grid_kind", "log or linear"),
    "grid_start": ("float", "positive number (first grid time)"),
    "grid_stop": ("float", "positive number (last grid time)"),
    "grid_count": ("int", "integer >= 2"),
    "rel_tol": ("float", "number in (0, 1)"),
    "margin_factor": ("float", "positive number"),
    "out": ("str", "output directory path"),
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a subcommand needs, already validated.

    grid_start/grid_stop/grid_count stay None when not configured; each
    subcommand then falls back to its own documented span.
    """

    params: PhysicalParams
    model: OccupationModel = OccupationModel.HIGH_T
    violation_model: OccupationModel = OccupationModel.HIGH_T
    positivity_model: OccupationModel = OccupationModel.UNIFORM
    grid_kind: str = "log"
    grid_start: Optional[float] = None
    grid_stop: Optional[float] = None
    grid_count: Optional[int] = None
    rel_tol: float = 1e-8
    margin_factor: float = 10.0
    out: str = "."

    def as_mapping(self) -> dict:
        """Resolved config as plain values in a fixed key order, for the
        provenance block of JSON reports."""
        p = self.params
        return {
            "m": p.m,
            "omega": p.omega,
            "gamma": p.gamma,
            "alpha": p.alpha,
            "T": p.T,
            "hbar": p.hbar,
            "k": p.k,
            "model": self.model.value,
            "violation_model": self.violation_model.value,
            "positivity_model": self.positivity_model.value,
            "grid_kind": self.grid_kind,
            "grid_start": self.grid_start,
            "grid_stop": self.grid_stop,
            "grid_count": self.grid_count,
            "rel_tol": self.rel_tol,
            "margin_factor": self.margin_factor,
            "out": self.out,
        }


def read_config_file(path) -> dict:
    """Raw key -> value strings from a flat config file.

    Rejects anything that is not blank, a comment, or `key = value`, and
    rejects duplicate keys (a silently shadowed value is a typo magnet).
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key or not val:
            raise ConfigError(
                f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}"
            )
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = val
    return values


def _convert(key: str, raw):
    kind, form = _SCHEMA[key]
    if kind == "str":
        return str(raw)
    if kind == "model":
        try:
            return OccupationModel.from_string(str(raw))
        except DomainError:
            raise ConfigError(f"config key {key!r} expects {form}, got {raw!r}") from None
    if kind == "grid_kind":
        val = str(raw).strip().lower()
        if val not in ("log", "linear"):
            raise ConfigError(f"config key {key!r} expects {form}, got {raw!r}")
        return val
    if kind == "int":
        try:
            val = int(str(raw), 10)
        except ValueError:
            raise ConfigError(f"config key {key!r} expects {form}, got {raw!r}") from None
        return val
    try:
        val = float(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"config key {key!r} expects {form}, got {raw!r}") from None
    if not np.isfinite(val):
        raise ConfigError(f"config key {key!r} expects {form}, got {raw!r}")
    return val


def parse_config(path=None, overrides: Optional[dict] = None) -> RunConfig:
    """Merge defaults <- file <- overrides into a validated RunConfig.

    `overrides` carries command-line flag values (raw strings are fine);
    entries that are None are treated as "flag not given".  Unknown keys in
    either source raise ConfigError naming the key.  Physical-regime
    violations (alpha < 3*gamma, kappa <= 0, ...) propagate from
    PhysicalParams as RegimeError/DomainError, distinct from config errors.
    """
    merged: dict = {}
    for source in (read_config_file(path) if path is not None else {}, overrides or {}):
        for key, raw in source.items():
            if raw is None:
                continue
            if key not in _SCHEMA:
                raise ConfigError(
                    f"unknown config key {key!r}; valid keys: "
                    + ", ".join(sorted(_SCHEMA))
                )
            merged[key] = _convert(key, raw)

    param_kwargs = {
        name: merged.pop(name) for name in ("m", "omega", "gamma", "alpha", "T", "hbar", "k")
        if name in merged
    }
    params = PhysicalParams(**param_kwargs)

    cfg = RunConfig(params=params, **merged)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig):
    if not 0.0 < cfg.rel_tol < 1.0:
        raise ConfigError(f"rel_tol must lie in (0, 1), got {cfg.rel_tol}")
    if cfg.margin_factor <= 0.0:
        raise ConfigError(f"margin_factor must be positive, got {cfg.margin_factor}")
    given = [v is not None for v in (cfg.grid_start, cfg.grid_stop)]
    if any(given) and not all(given):
        raise ConfigError("grid_start and grid_stop must be given together")
    if cfg.grid_count is not None and cfg.grid_count < 2:
        raise ConfigError(f"grid_count must be >= 2, got {cfg.grid_count}")
    if cfg.grid_start is not None:
        if cfg.grid_start >= cfg.grid_stop:
            raise ConfigError(
                f"grid_start must be < grid_stop, got {cfg.grid_start} >= {cfg.grid_stop}"
            )
        low_ok = cfg.grid_start > 0.0 if cfg.grid_kind == "log" else cfg.grid_start >= 0.0
        if not low_ok:
            raise ConfigError(
                f"grid_start must be {'> 0 for log grids' if cfg.grid_kind == 'log' else '>= 0'}, "
                f"got {cfg.grid_start}"
            )


def resolve_grid(cfg: RunConfig, span_alpha_t: tuple, count: int) -> np.ndarray:
    """The subcommand's time grid.

    Explicit grid_* keys win; otherwise the span (in alpha*t units) and
    count provided by the subcommand apply, so each tool lands on the time
    window its quantities are meaningful in.
    """
    if cfg.grid_start is not None:
        start, stop = cfg.grid_start, cfg.grid_stop
    else:
        start = span_alpha_t[0] / cfg.params.alpha
        stop = span_alpha_t[1] / cfg.params.alpha
    n = cfg.grid_count if cfg.grid_count is not None else count
    if cfg.grid_kind == "linear":
        return np.linspace(start, stop, n)
    return np.geomspace(start, stop, n)
