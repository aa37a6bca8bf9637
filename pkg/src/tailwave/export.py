"""CSV grids and JSON run reports."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

SCHEMA = "tailwave/1"


def emit_plot_data(field, path) -> Path:
    """Write a field (Field or RiemannField) as a plot-ready CSV grid.

    The header row holds the first-axis coordinates (u or t), the first
    column the second-axis coordinates (v or x); cell (row j, column i) is
    the value at (axis0[i], axis1[j]). Numbers use repr, the shortest
    string that round-trips to the same float.
    """
    if path is None or str(path) == "":
        raise FileNotFoundError("empty output path for CSV export")
    path = Path(path)
    axis0, axis1 = field.grid.axes
    names = getattr(field.grid, "axis_names", ("u", "v"))
    values = np.asarray(field.values, dtype=float)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"{names[1]}\\{names[0]}"] + [repr(float(a)) for a in axis0])
        for j, b in enumerate(axis1):
            writer.writerow([repr(float(b))] + [repr(float(x)) for x in values[:, j]])
    return path


def read_plot_data(path):
    """Inverse of emit_plot_data: (axis0, axis1, values[i, j])."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    axis0 = np.array([float(x) for x in rows[0][1:]])
    axis1 = np.array([float(r[0]) for r in rows[1:]])
    values = np.array([[float(x) for x in r[1:]] for r in rows[1:]]).T
    return axis0, axis1, values


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if np.isfinite(x):
            return x
        return "nan" if np.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def build_report(command: str, config: dict, result: dict, version: str) -> dict:
    return {"schema": SCHEMA, "version": version, "command": command,
            "config": _clean(config), "result": _clean(result)}


def dumps_report(report: dict) -> str:
    """Deterministic serialisation: sorted keys, fixed indentation, no timestamps."""
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"
