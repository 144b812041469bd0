"""CSV readers with strict schema validation.

Each reader checks the header against the schema the solver CLI writes and
raises :class:`SchemaError` on any mismatch, which the command-line driver
turns into a nonzero exit code.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

__all__ = ["SchemaError", "read_snapshot", "read_series", "read_diag",
           "read_table"]

DIAG_HEADER = ["t", "mass", "max_f", "max_g", "momentum_residual", "S", "V"]
MOMENT_HEADER = ["t", "M_upwind", "M_mcu1", "M_mcu0"]
TABLE_HEADER = ["Nxi", "maxM_upwind", "maxM_mcu1", "maxM_mcu0"]


class SchemaError(Exception):
    """Input CSV does not match the expected solver-output schema."""


def _read_rows(path):
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"empty CSV: {path}")
    return rows[0], rows[1:]


def _as_float_columns(path, header, body):
    try:
        data = np.array([[float(tok) for tok in row] for row in body])
    except ValueError as exc:
        raise SchemaError(f"non-numeric cell in {path}: {exc}") from None
    if body and data.shape[1] != len(header):
        raise SchemaError(f"ragged rows in {path}")
    if not body:
        data = np.empty((0, len(header)))
    return {name: data[:, k] for k, name in enumerate(header)}


def read_snapshot(path):
    """Long-format field snapshot: columns (x, v|xi, value).

    Returns (x_axis, coord_axis, values[x, coord], coord_name).
    """
    header, body = _read_rows(path)
    if len(header) != 3 or header[0] != "x" or header[2] != "value" \
            or header[1] not in ("v", "xi"):
        raise SchemaError(
            f"{path}: expected header x,<v|xi>,value, got {header}")
    cols = _as_float_columns(path, ["x", "c", "value"], body)
    x = np.unique(cols["x"])
    c = np.unique(cols["c"])
    if x.size * c.size != cols["value"].size:
        raise SchemaError(f"{path}: rows do not form a full (x, {header[1]}) "
                          f"grid")
    # rows are written x-major with the coordinate varying fastest
    vals = cols["value"].reshape(x.size, c.size)
    order = np.argsort(cols["x"][:: c.size], kind="stable")
    return x, c, vals[order], header[1]


def read_series(path, required=()):
    """Generic numeric time-series CSV; checks the required columns exist."""
    header, body = _read_rows(path)
    missing = [name for name in required if name not in header]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}")
    return _as_float_columns(path, header, body)


def read_diag(path):
    header, body = _read_rows(path)
    if header != DIAG_HEADER:
        raise SchemaError(f"{path}: expected diagnostics header "
                          f"{DIAG_HEADER}, got {header}")
    return _as_float_columns(path, header, body)


def read_table(path):
    header, body = _read_rows(path)
    if header != TABLE_HEADER:
        raise SchemaError(f"{path}: expected table header {TABLE_HEADER}, "
                          f"got {header}")
    return _as_float_columns(path, header, body)
