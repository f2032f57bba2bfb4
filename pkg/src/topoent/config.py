"""Run configuration: a flat ``key = value`` document plus CLI overrides.

Values are JSON literals (numbers, lists, quoted strings, true/false/null);
a bare word is taken as a string. ``#`` starts a comment line.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import ConfigError

EXPERIMENTS = (
    "spectrum",
    "edge-modes",
    "density",
    "sweep",
    "track",
    "derive-window",
    "window-stats",
    "window-prob",
    "components",
    "units",
)
FORMATS = ("csv", "json")
TOP_LEVEL = ("experiment", "seed", "output", "format")


def _float(x):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ValueError("expected a number")
    return float(x)


def _int(x):
    if isinstance(x, bool) or not isinstance(x, int):
        if isinstance(x, float) and x.is_integer():
            return int(x)
        raise ValueError("expected an integer")
    return x


def _opt(conv):
    return lambda x: None if x is None else conv(x)


def _floats(x):
    if not isinstance(x, list):
        raise ValueError("expected a list of numbers")
    return [_float(v) for v in x]


def _choice(*options):
    def conv(x):
        if x not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return x

    return conv


def _positive(conv):
    def check(x):
        x = conv(x)
        if x is not None and not x > 0:
            raise ValueError("must be positive")
        return x

    return check


def _nonneg(conv):
    def check(x):
        x = conv(x)
        if x is not None and x < 0:
            raise ValueError("must be non-negative")
        return x

    return check


# name -> (converter, default)
PARAMETERS = {
    "unit_cells": (_int, 4),
    "v": (_nonneg(_float), 0.1),
    "w": (_nonneg(_float), 1.0),
    "unit_cells2": (_opt(_int), None),
    "v2": (_opt(_nonneg(_float)), None),
    "w2": (_opt(_nonneg(_float)), None),
    "xi1": (_float, 1e-3),
    "xi2": (_float, 1e-3),
    "delta": (_nonneg(_float), 0.0),
    "sample": (_nonneg(_int), 0),
    "delta_grid": (_floats, [0.0]),
    "samples": (_positive(_int), 100),
    "disorder_mode": (_choice("relative", "absolute"), "relative"),
    "outcome": (_choice("e", "g"), "e"),
    "index": (_opt(_positive(_int)), None),
    "system": (_choice("composite", "ssh"), "composite"),
    "center_e": (_opt(_float), None),
    "center_g": (_opt(_float), None),
    "width": (_opt(_nonneg(_float)), None),
    "sites": (_positive(_int), 16),
    "ratios": (_floats, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6]),
    "w_hz": (_positive(_float), 50e6),
    "q_factor": (_positive(_float), 250000.0),
    "f_res": (_positive(_float), 5e9),
    "workers": (_positive(_int), 1),
}


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    parameters: dict = field(default_factory=dict)
    seed: int = 0
    output: str = "topoent_out"
    format: str = "csv"

    def echo(self) -> dict:
        return {
            "experiment": self.experiment,
            "seed": self.seed,
            "output": self.output,
            "format": self.format,
            **{k: self.parameters[k] for k in sorted(self.parameters)},
        }

    def to_text(self) -> str:
        return "".join(f"{k} = {json.dumps(v)}\n" for k, v in self.echo().items())

    def __getitem__(self, key):
        return self.parameters[key]


def _parse_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _read_document(text: str, source: str) -> dict:
    values: dict[str, tuple[object, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, raw = stripped.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {stripped!r}")
        if key in values:
            raise ConfigError(
                f"duplicate key {key!r} at {source}:{values[key][1]} and {source}:{lineno}"
            )
        values[key] = (_parse_value(raw.strip()), lineno)
    return {k: v for k, (v, _) in values.items()}


def parse_override(item: str) -> tuple[str, object]:
    key, sep, raw = item.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"override must look like key=value, got {item!r}")
    return key.strip(), _parse_value(raw.strip())


def parse_config(text: str = "", overrides: dict | None = None, source: str = "<config>") -> RunConfig:
    """Validate a configuration document, apply overrides and fill defaults.

    Raises ``ConfigError`` naming the offending field for unknown keys,
    duplicate keys, missing ``experiment`` and out-of-range values.
    """
    doc = _read_document(text, source)
    doc.update(overrides or {})

    unknown = sorted(set(doc) - set(TOP_LEVEL) - set(PARAMETERS))
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    if "experiment" not in doc:
        raise ConfigError("missing required field 'experiment'")
    experiment = doc["experiment"]
    if experiment not in EXPERIMENTS:
        raise ConfigError(f"field 'experiment': {experiment!r} is not one of {', '.join(EXPERIMENTS)}")
    fmt = doc.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError(f"field 'format': {fmt!r} is not one of {', '.join(FORMATS)}")
    try:
        seed = _int(doc.get("seed", 0))
    except ValueError as exc:
        raise ConfigError(f"field 'seed': {exc}") from None
    if not 0 <= seed < 2**64:
        raise ConfigError("field 'seed': must be a 64-bit unsigned integer")
    output = doc.get("output", "topoent_out")
    if not isinstance(output, str) or not output:
        raise ConfigError("field 'output': expected a non-empty path prefix")

    params = {}
    for name, (conv, default) in PARAMETERS.items():
        raw = doc.get(name, default)
        try:
            params[name] = conv(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"field {name!r}: {exc} (got {raw!r})") from None
        if isinstance(params[name], float) and math.isnan(params[name]):
            raise ConfigError(f"field {name!r}: nan is not allowed")
    grid = params["delta_grid"]
    if not grid or any(d < 0 for d in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("field 'delta_grid': must be non-empty, non-negative and strictly ascending")
    if params["unit_cells"] < 2 or (params["unit_cells2"] is not None and params["unit_cells2"] < 2):
        raise ConfigError("field 'unit_cells': must be >= 2")
    return RunConfig(experiment, params, seed, output, fmt)
