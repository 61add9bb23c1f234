"""Command-line front end.

Exit codes: 0 success, 1 verification mismatch, 2 usage or input error,
3 infeasible calibration.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__, io, materials
from .calibration import CalibrationInfeasible, calibrate, verify_rotation
from .elasticity import (
    cauchy_project_voigt,
    cauchy_residual,
    reflection_transform,
    universal_anisotropy_index,
    voigt_to_full,
)
from .lattice import (
    INFLUENCE_KINDS,
    SHAPES,
    HorizonTooSmall,
    InfluenceFunction,
    axis_rotation,
    build_neighborhood,
    composed_rotation,
)
from .solver import SolverOptions

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_angle(text: str) -> float:
    """Angle with an explicit unit: ``60deg``, ``60°``, ``1.047rad`` or ``pi/3rad``."""
    s = text.strip().lower().replace(" ", "")
    m = re.fullmatch(r"(.+?)(deg|°|rad)", s)
    if not m:
        raise UsageError(f"angle {text!r} needs an explicit unit suffix (deg or rad)")
    value, unit = m.groups()
    pi_expr = re.fullmatch(r"([-+]?\d*\.?\d*)\*?pi(?:/(\d+\.?\d*))?", value)
    try:
        if pi_expr:
            num = pi_expr.group(1)
            factor = float(num) if num not in ("", "+", "-") else (-1.0 if num == "-" else 1.0)
            x = factor * math.pi / (float(pi_expr.group(2)) if pi_expr.group(2) else 1.0)
        else:
            x = float(value)
    except ValueError:
        raise UsageError(f"cannot parse angle {text!r}") from None
    return math.radians(x) if unit in ("deg", "°") else x


def parse_normal(text: str) -> np.ndarray:
    axes = {"x": 0, "y": 1, "z": 2, "e1": 0, "e2": 1, "e3": 2}
    key = text.strip().lower()
    if key in axes:
        n = np.zeros(3)
        n[axes[key]] = 1.0
        return n
    try:
        n = np.array([float(t) for t in key.split(",")])
    except ValueError:
        raise UsageError(f"cannot parse reflection normal {text!r}") from None
    if n.shape != (3,) or not np.linalg.norm(n) > 0:
        raise UsageError(f"reflection normal {text!r} must be a nonzero 3-vector")
    return n / np.linalg.norm(n)


def resolve_material(spec: str):
    path = Path(spec)
    if path.suffix.lower() == ".json" or path.is_file():
        try:
            return io.load_material(path)
        except (OSError, io.FormatError) as exc:
            raise UsageError(str(exc)) from None
    try:
        return materials.get(spec).stiffness
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _neighborhood(args):
    try:
        n = build_neighborhood(args.shape, args.horizon, args.spacing)
    except (HorizonTooSmall, ValueError) as exc:
        raise UsageError(str(exc)) from None
    return n, InfluenceFunction.for_neighborhood(args.influence, n, args.power_exp)


def _options(args) -> SolverOptions:
    return SolverOptions(lower_bound=args.lower_bound, method=args.method)


def _fmt_matrix(c: np.ndarray) -> str:
    return "\n".join("  " + " ".join(f"{v:9.4g}" for v in row) for row in c)


def cmd_materials(args) -> int:
    if args.action == "list":
        rows = []
        for m in materials.CATALOG:
            rows.append({"name": m.key, "symmetry": m.symmetry, "anisotropy_index": universal_anisotropy_index(m.stiffness)})
        if args.json:
            print(json.dumps(rows, indent=2))
        else:
            for r in rows:
                print(f"{r['name']:<12} {r['symmetry']:<24} A_U = {r['anisotropy_index']:.4f}")
        return EXIT_OK
    if not args.name:
        raise UsageError("materials show needs a material name")
    c = resolve_material(args.name)
    full = voigt_to_full(c)
    info = {
        **io.material_to_dict(c),
        "cauchy_residual": cauchy_residual(full),
        "anisotropy_index": universal_anisotropy_index(c),
    }
    if args.json:
        print(json.dumps(info, indent=2))
    else:
        print(f"{c.name}")
        print(_fmt_matrix(c.entries))
        print(f"cauchy_residual = {info['cauchy_residual']:.6g}")
        print(f"A_U = {info['anisotropy_index']:.4f}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    ref = resolve_material(args.material)
    if args.project_cauchy:
        ref = cauchy_project_voigt(ref)
    n, f = _neighborhood(args)
    try:
        report = calibrate(ref, n, f, _options(args))
    except CalibrationInfeasible as exc:
        print(f"pdcalib: {exc}", file=sys.stderr)
        if args.report:
            diag = {k: v for k, v in exc.diagnostics.items()}
            io.dump_json({"status": "infeasible", "message": str(exc), **diag}, args.report)
        return EXIT_INFEASIBLE
    if args.out:
        io.write_micromoduli_csv(args.out, n.xi, n.lengths, report.micromoduli.c)
    data = report.to_dict(timestamp=not args.no_timestamp)
    if args.report:
        io.dump_json(data, args.report)
    print(f"{ref.name or 'material'}: relative error {report.relative_error:.6%} "
          f"({len(n)} bonds, micromoduli {report.micromoduli.c.min():.4g}..{report.micromoduli.c.max():.4g})")
    return EXIT_OK


def cmd_verify(args) -> int:
    ref = resolve_material(args.material)
    chosen = [x for x in (args.rotation, args.rotate_z, args.reflect) if x is not None]
    if len(chosen) != 1:
        raise UsageError("verify needs exactly one of --rotation, --rotate-z, --reflect")
    if args.rotation is not None:
        q = composed_rotation(parse_angle(args.rotation))
    elif args.rotate_z is not None:
        q = axis_rotation(2, parse_angle(args.rotate_z))
    else:
        q = reflection_transform(parse_normal(args.reflect))
    n, f = _neighborhood(args)
    try:
        rec = verify_rotation(ref, n, f, q, _options(args), symmetry_tol=args.symmetry_tol)
    except CalibrationInfeasible as exc:
        print(f"pdcalib: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    out = {"material": ref.name, "transform": q.q.tolist(), **rec.to_dict()}
    if args.json:
        print(json.dumps(out, indent=2))
    else:
        for k, v in out.items():
            if k != "transform":
                print(f"{k:<28} {v}")
    return EXIT_OK if rec.effective_match <= 1e-8 else EXIT_MISMATCH


def cmd_viz(args) -> int:
    try:
        data = io.read_micromoduli_csv(args.result)
    except io.FormatError as exc:
        raise UsageError(str(exc)) from None
    points, values = data["xi"], data["micromodulus"]
    if args.format == "vtk":
        text = io.vtk_polydata(points, values)
        default = Path(args.result).with_suffix(".vtk")
    else:
        text = io.point_cloud_csv(points, values)
        default = Path(args.result).with_name(Path(args.result).stem + "_points.csv")
    out = Path(args.out) if args.out else default
    io.atomic_write_text(out, text)
    print(f"wrote {len(points)} points to {out}")
    return EXIT_OK


def cmd_neighborhood(args) -> int:
    try:
        n = build_neighborhood(args.shape, args.horizon, args.spacing)
    except (HorizonTooSmall, ValueError) as exc:
        raise UsageError(str(exc)) from None
    text = io.neighborhood_csv(n.xi, n.lengths, n.volumes)
    if args.out:
        io.atomic_write_text(args.out, text)
        print(f"wrote {len(n)} bonds to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _add_lattice_args(p):
    p.add_argument("--shape", choices=SHAPES, default="sphere")
    p.add_argument("--horizon", type=float, default=6.0, help="horizon in lattice units (default 6)")
    p.add_argument("--spacing", type=float, default=1.0)
    p.add_argument("--influence", choices=INFLUENCE_KINDS, default="inverse")
    p.add_argument("--power-exp", type=float, default=1.5, help="exponent of the power-law influence")
    p.add_argument("--lower-bound", type=float, default=0.0)
    p.add_argument("--method", choices=("dual", "nullspace"), default="dual")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdcalib", description="Calibrate anisotropic bond-based peridynamic micromoduli.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("materials", help="list or show catalog materials")
    p.add_argument("action", choices=("list", "show"))
    p.add_argument("name", nargs="?")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_materials)

    p = sub.add_parser("calibrate", help="calibrate micromoduli for a material")
    p.add_argument("--material", required=True, help="catalog name or material JSON file")
    _add_lattice_args(p)
    p.add_argument("--project-cauchy", action="store_true", help="impose Cauchy's relations on the input first")
    p.add_argument("--out", help="micromoduli CSV output")
    p.add_argument("--report", help="report JSON output")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp from the report")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("verify", help="lattice transformation check")
    p.add_argument("--material", required=True)
    p.add_argument("--rotation", help="equi-angle rotation R_x R_y R_z, e.g. 30deg")
    p.add_argument("--rotate-z", help="rotation about e3, e.g. 60deg")
    p.add_argument("--reflect", help="reflection normal: x, y, z or 'a,b,c'")
    _add_lattice_args(p)
    p.add_argument("--symmetry-tol", type=float, default=1e-6)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("viz", help="export micromoduli as a point cloud")
    p.add_argument("--result", required=True, help="micromoduli CSV from calibrate")
    p.add_argument("--format", choices=("csv", "vtk"), default="vtk")
    p.add_argument("--out")
    p.set_defaults(func=cmd_viz)

    p = sub.add_parser("neighborhood", help="export the bonds of a neighborhood as CSV")
    p.add_argument("--shape", choices=SHAPES, default="sphere")
    p.add_argument("--horizon", type=float, default=6.0)
    p.add_argument("--spacing", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_neighborhood)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pdcalib: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
