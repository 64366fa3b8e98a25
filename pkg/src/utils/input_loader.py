"""Readers for density and discrete-measure files.

Densities: JSON {"x_min", "x_max", "values"} or a two-column x,p CSV on a
uniform grid. Discrete measures: CSV rows of atom coordinates followed by
a weight.
"""
import csv
import json
from pathlib import Path
from typing import List

import numpy as np

from ..models.measure import DiscreteMeasure, GridDensity1D
from .exceptions import InputFormatError

# relative spacing tolerance for CSV grids
_GRID_TOL = 1e-6


def _read_rows(path: Path) -> List[List[float]]:
    rows = []
    with open(path, newline="") as handle:
        for line_no, row in enumerate(csv.reader(handle), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                if line_no == 1 and not rows:
                    continue  # header
                raise InputFormatError(f"non-numeric entry on line {line_no} of {path}", field=f"line {line_no}")
    if not rows:
        raise InputFormatError(f"{path} holds no data rows", field="rows")
    width = len(rows[0])
    for k, row in enumerate(rows):
        if len(row) != width:
            raise InputFormatError(f"row {k + 1} has {len(row)} columns, expected {width}", field=f"row {k + 1}")
    return rows


def _density_from_json(path: Path) -> GridDensity1D:
    try:
        payload = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise InputFormatError(f"{path} is not valid JSON: {e}", field="json")
    if not isinstance(payload, dict):
        raise InputFormatError("density JSON must be an object", field="json")
    for key in ("x_min", "x_max", "values"):
        if key not in payload:
            raise InputFormatError(f"missing field '{key}'", field=key)
    values = payload["values"]
    if not isinstance(values, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
    ):
        raise InputFormatError("'values' must be a list of numbers", field="values")
    for key in ("x_min", "x_max"):
        if not isinstance(payload[key], (int, float)) or isinstance(payload[key], bool):
            raise InputFormatError(f"'{key}' must be a number", field=key)
    return GridDensity1D(
        x_min=float(payload["x_min"]), x_max=float(payload["x_max"]), n=len(values),
        values=np.asarray(values, dtype=float), label=path.stem,
    )


def _density_from_csv(path: Path) -> GridDensity1D:
    table = np.asarray(_read_rows(path))
    if table.shape[1] != 2:
        raise InputFormatError(f"density CSV needs two columns x,p, found {table.shape[1]}", field="columns")
    x, p = table[:, 0], table[:, 1]
    if x.size < 3:
        raise InputFormatError("density CSV needs at least three rows", field="rows")
    steps = np.diff(x)
    if np.any(steps <= 0.0) or np.max(np.abs(steps - steps[0])) > _GRID_TOL * abs(steps[0]):
        raise InputFormatError("x column must be a uniform increasing grid", field="x")
    return GridDensity1D(x_min=float(x[0]), x_max=float(x[-1]), n=x.size, values=p, label=path.stem)


def load_density(path) -> GridDensity1D:
    """Grid density from a .json or .csv file; the caller normalises it."""
    path = Path(path)
    if not path.exists():
        raise InputFormatError(f"{path} does not exist", field="input")
    if path.suffix.lower() == ".json":
        return _density_from_json(path)
    return _density_from_csv(path)


def load_discrete(path) -> DiscreteMeasure:
    """Discrete measure from CSV rows (x_1, ..., x_d, weight)."""
    path = Path(path)
    if not path.exists():
        raise InputFormatError(f"{path} does not exist", field="input")
    table = np.asarray(_read_rows(path))
    if table.shape[1] < 2:
        raise InputFormatError("discrete CSV needs atom coordinates and a weight column", field="columns")
    weights = table[:, -1]
    if np.any(weights <= 0.0) or not np.all(np.isfinite(table)):
        raise InputFormatError("weights must be positive and entries finite", field="weight")
    return DiscreteMeasure.from_points(table[:, :-1], weights)
