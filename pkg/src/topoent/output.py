"""Deterministic CSV/JSON serialization of results.

Floats are written with 17 significant digits, so reruns with the same
configuration produce identical bytes and values round-trip exactly.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .entanglement import DensityMatrix
from .ensemble import EnsembleReport
from .spectra import Eigensystem


@dataclass
class Table:
    """Rows under a header; ``matrix=True`` writes a bare numeric grid."""

    header: tuple[str, ...]
    rows: list
    summary: dict = field(default_factory=dict)
    matrix: bool = False


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def to_json(obj) -> str:
    """JSON with fixed float formatting; non-finite floats become null."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def as_table(result, summary: dict | None = None) -> Table:
    if isinstance(result, Table):
        if summary:
            result.summary.update(summary)
        return result
    if isinstance(result, EnsembleReport):
        extra = {
            "experiment": result.experiment,
            "master_seed": result.master_seed,
            "config_hash": result.config_hash,
            **result.metadata,
            "per_delta": result.summary(),
        }
        return Table(result.header, result.rows, {**extra, **(summary or {})})
    if isinstance(result, Eigensystem):
        rows = [(k + 1, e) for k, e in enumerate(result.energies)]
        return Table(("index", "energy"), rows, dict(summary or {}))
    if isinstance(result, DensityMatrix):
        return Table((), [tuple(r) for r in result.rho], dict(summary or {}), matrix=True)
    raise TypeError(f"no table layout for {type(result).__name__}")


def preflight(prefix: str) -> Path:
    """Make sure files can be created under ``prefix`` before any work starts."""
    path = Path(prefix)
    parent = path.parent if str(path.parent) else Path(".")
    parent.mkdir(parents=True, exist_ok=True)
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise PermissionError(f"output directory {str(parent)!r} is not writable")
    for suffix in (".csv", ".json"):
        target = path.with_name(path.name + suffix)
        if target.exists() and not os.access(target, os.W_OK):
            raise PermissionError(f"output file {str(target)!r} is not writable")
    return path


def _csv(table: Table) -> str:
    lines = [] if table.matrix else [",".join(table.header)]
    lines.extend(",".join(fmt(x) for x in row) for row in table.rows)
    return "\n".join(lines) + "\n"


def emit_report(result, cfg: RunConfig, summary: dict | None = None) -> list[Path]:
    """Write ``<output>.csv`` plus a ``<output>.json`` sidecar (or a single JSON for format=json).

    The sidecar carries ``config`` (the effective configuration), ``seed``,
    ``summary`` and ``version``.
    """
    table = as_table(result, summary)
    prefix = preflight(cfg.output)
    meta = {"config": cfg.echo(), "seed": cfg.seed, "summary": table.summary, "version": __version__}
    json_path = prefix.with_name(prefix.name + ".json")
    written = []
    if cfg.format == "csv":
        csv_path = prefix.with_name(prefix.name + ".csv")
        csv_path.write_text(_csv(table), encoding="utf-8")
        written.append(csv_path)
    else:
        meta["data"] = (
            [list(r) for r in table.rows]
            if table.matrix
            else [dict(zip(table.header, r)) for r in table.rows]
        )
    json_path.write_text(to_json(meta) + "\n", encoding="utf-8")
    written.append(json_path)
    return written
