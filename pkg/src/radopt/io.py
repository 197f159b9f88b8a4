"""On-disk artifacts: convergence CSV, legacy VTK fields and text reports."""

import csv
from pathlib import Path

import numpy as np

from .errors import InvalidArgument
from .history import COLUMNS, ConvergenceHistory, HistoryRow

_INT_COLUMNS = {"iter", "newton_iters"}


def _num(v):
    return str(int(v)) if isinstance(v, (int, np.integer)) else format(float(v), ".17g")


def write_history(history, path):
    """CSV with a fixed header, 17 significant digits and LF line endings."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(COLUMNS) + "\n")
        for row in history:
            fh.write(",".join(_num(getattr(row, c)) for c in COLUMNS) + "\n")


def read_history(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != COLUMNS:
            raise InvalidArgument(f"unexpected history header {header}")
        rows = []
        for rec in reader:
            vals = {c: (int(v) if c in _INT_COLUMNS else float(v)) for c, v in zip(COLUMNS, rec)}
            rows.append(HistoryRow(**vals))
    return ConvergenceHistory(rows)


def _scalars(name, values):
    out = [f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
    out += [format(float(v), ".17g") for v in values]
    return out


def write_field_vtk(mesh, fields, path, kinds=None, title="radopt fields"):
    """Legacy ASCII unstructured grid with one scalar section per field.

    Fields of node length go to POINT_DATA, of triangle length to
    CELL_DATA.  When the two counts coincide, ``kinds`` (name -> "point" or
    "cell") must say which.  Field order follows ``fields``.
    """
    kinds = dict(kinds or {})
    point, cell = [], []
    for name, values in fields.items():
        v = np.asarray(values, dtype=float).ravel()
        kind = kinds.get(name)
        if kind is None:
            if len(v) == mesh.n_nodes and len(v) != mesh.n_triangles:
                kind = "point"
            elif len(v) == mesh.n_triangles and len(v) != mesh.n_nodes:
                kind = "cell"
            else:
                raise InvalidArgument(f"cannot tell whether field {name!r} is nodal or elemental")
        expected = mesh.n_nodes if kind == "point" else mesh.n_triangles
        if len(v) != expected:
            raise InvalidArgument(f"field {name!r} has {len(v)} values, expected {expected}")
        (point if kind == "point" else cell).append((name, v))

    n, t = mesh.n_nodes, mesh.n_triangles
    lines = ["# vtk DataFile Version 3.0", title, "ASCII", "DATASET UNSTRUCTURED_GRID", f"POINTS {n} double"]
    lines += [f"{x:.17g} {y:.17g} 0" for x, y in mesh.nodes]
    lines.append(f"CELLS {t} {4 * t}")
    lines += [f"3 {a} {b} {c}" for a, b, c in mesh.triangles]
    lines.append(f"CELL_TYPES {t}")
    lines += ["5"] * t
    if cell:
        lines.append(f"CELL_DATA {t}")
        for name, v in cell:
            lines += _scalars(name, v)
    if point:
        lines.append(f"POINT_DATA {n}")
        for name, v in point:
            lines += _scalars(name, v)
    Path(path).write_text("\n".join(lines) + "\n")


def read_vtk_scalars(path):
    """Minimal reader for files produced by :func:`write_field_vtk`: name -> array."""
    tokens = Path(path).read_text().split("\n")
    out = {}
    i = 0
    count = {"POINT_DATA": 0, "CELL_DATA": 0}
    current = 0
    while i < len(tokens):
        parts = tokens[i].split()
        if parts and parts[0] in count:
            current = int(parts[1])
        elif parts and parts[0] == "SCALARS":
            out[parts[1]] = np.array([float(x) for x in tokens[i + 2:i + 2 + current]])
            i += 1 + current
        i += 1
    return out


def write_text_report(path, lines):
    Path(path).write_text("\n".join(lines) + "\n")
