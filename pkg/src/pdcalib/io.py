"""File formats: material JSON, micromoduli/neighborhood CSV, report JSON, VTK point clouds."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .elasticity import VoigtStiffness

MICROMODULI_COLUMNS = ("bond_id", "xi_x", "xi_y", "xi_z", "length", "micromodulus")
NEIGHBORHOOD_COLUMNS = ("bond_id", "xi_x", "xi_y", "xi_z", "length", "volume")


class FormatError(ValueError):
    pass


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to a temporary file next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def material_from_dict(data: dict) -> VoigtStiffness:
    if not isinstance(data, dict):
        raise FormatError("material JSON must be an object")
    units = data.get("units", "GPa")
    if units != "GPa":
        raise FormatError(f"unsupported units {units!r}; expected 'GPa'")
    if "voigt" not in data:
        raise FormatError("material JSON needs a 'voigt' 6x6 array")
    try:
        arr = np.array(data["voigt"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"invalid voigt matrix: {exc}") from exc
    if arr.shape != (6, 6):
        raise FormatError(f"voigt matrix must be 6x6, got shape {arr.shape}")
    try:
        return VoigtStiffness(arr, name=data.get("name"), tol=1e-6)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def material_to_dict(c: VoigtStiffness) -> dict:
    return {"name": c.name, "units": "GPa", "voigt": c.entries.tolist()}


def load_material(path) -> VoigtStiffness:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    return material_from_dict(data)


def dump_json(data, path) -> None:
    atomic_write_text(path, json.dumps(data, indent=2, sort_keys=False) + "\n")


def _rows_to_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        # repr round-trips floats exactly
        writer.writerow([v if isinstance(v, (int, np.integer)) else repr(float(v)) for v in row])
    return buf.getvalue()


def micromoduli_csv(xi: np.ndarray, lengths: np.ndarray, c: np.ndarray) -> str:
    rows = ((k, *xi[k], lengths[k], c[k]) for k in range(len(c)))
    return _rows_to_csv(MICROMODULI_COLUMNS, rows)


def write_micromoduli_csv(path, xi, lengths, c) -> None:
    atomic_write_text(path, micromoduli_csv(np.asarray(xi), np.asarray(lengths), np.asarray(c)))


def neighborhood_csv(xi: np.ndarray, lengths: np.ndarray, volumes: np.ndarray) -> str:
    rows = ((k, *xi[k], lengths[k], volumes[k]) for k in range(len(xi)))
    return _rows_to_csv(NEIGHBORHOOD_COLUMNS, rows)


def read_micromoduli_csv(path) -> dict:
    """Parse a micromoduli CSV into arrays ``bond_id``, ``xi`` (M, 3), ``length``, ``micromodulus``."""
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or any(col not in reader.fieldnames for col in MICROMODULI_COLUMNS):
                raise FormatError(f"{path}: expected columns {', '.join(MICROMODULI_COLUMNS)}")
            rows = list(reader)
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    if not rows:
        raise FormatError(f"{path}: no bonds in result file")
    try:
        ids = np.array([int(r["bond_id"]) for r in rows])
        xi = np.array([[float(r["xi_x"]), float(r["xi_y"]), float(r["xi_z"])] for r in rows])
        length = np.array([float(r["length"]) for r in rows])
        mm = np.array([float(r["micromodulus"]) for r in rows])
    except (TypeError, ValueError) as exc:
        raise FormatError(f"{path}: {exc}") from exc
    return {"bond_id": ids, "xi": xi, "length": length, "micromodulus": mm}


def point_cloud_csv(points: np.ndarray, values: np.ndarray) -> str:
    return _rows_to_csv(("x", "y", "z", "micromodulus"), ((*p, v) for p, v in zip(points, values)))


def vtk_polydata(points: np.ndarray, values: np.ndarray, name: str = "micromodulus") -> str:
    """Legacy ASCII VTK POLYDATA with one vertex per point and a point scalar."""
    points = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(points) == 0:
        raise FormatError("no points to export")
    n = len(points)
    lines = [
        "# vtk DataFile Version 3.0",
        "bond micromoduli",
        "ASCII",
        "DATASET POLYDATA",
        f"POINTS {n} double",
    ]
    lines += [" ".join(repr(float(v)) for v in p) for p in points]
    lines.append(f"VERTICES {n} {2 * n}")
    lines += [f"1 {k}" for k in range(n)]
    lines += [f"POINT_DATA {n}", f"SCALARS {name} double 1", "LOOKUP_TABLE default"]
    lines += [repr(float(v)) for v in values]
    return "\n".join(lines) + "\n"


def read_vtk_polydata(path) -> dict:
    """Read back a file written by :func:`vtk_polydata`."""
    tokens = Path(path).read_text().split("\n")
    n = int(tokens[4].split()[1])
    points = np.array([[float(t) for t in line.split()] for line in tokens[5 : 5 + n]])
    start = 5 + n + 1 + n + 3
    values = np.array([float(t) for t in tokens[start : start + n]])
    return {"points": points, "values": values}
