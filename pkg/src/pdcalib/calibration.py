"""Calibration driver, closed-form oracle and lattice-rotation verification."""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .assembly import assemble, effective_stiffness
from .elasticity import (
    OrthogonalTransform,
    VoigtStiffness,
    cauchy_project_voigt,
    cauchy_residual,
    is_symmetry_transform,
    relative_error,
    tensor_distance,
    universal_anisotropy_index,
    voigt_to_full,
)
from .lattice import (
    InfluenceFunction,
    Neighborhood,
    build_neighborhood,
    match_bonds,
    transform_neighborhood,
)
from .solver import MicromoduliSolution, SolverInfeasible, SolverOptions, constrained_min_norm


class CalibrationInfeasible(SolverInfeasible):
    pass


def _anisotropy_or_none(c: VoigtStiffness) -> Optional[float]:
    try:
        return universal_anisotropy_index(c)
    except ValueError:
        return None


@dataclass(frozen=True, eq=False)
class CalibrationReport:
    material_name: Optional[str]
    reference: VoigtStiffness
    effective: VoigtStiffness
    micromoduli: MicromoduliSolution
    relative_error: float
    anisotropy_index_ref: Optional[float]
    cauchy_residual_ref: float
    settings: dict = field(default_factory=dict)

    @property
    def anisotropy_index_effective(self) -> Optional[float]:
        return _anisotropy_or_none(self.effective)

    def to_dict(self, timestamp: bool = True) -> dict:
        sol = self.micromoduli
        out = {
            "status": "converged",
            "material": self.material_name,
            "settings": self.settings,
            "reference": self.reference.entries.tolist(),
            "effective": self.effective.entries.tolist(),
            "relative_error": self.relative_error,
            "anisotropy_index_reference": self.anisotropy_index_ref,
            "anisotropy_index_effective": self.anisotropy_index_effective,
            "cauchy_residual_reference": self.cauchy_residual_ref,
            "cauchy_residual_effective": cauchy_residual(voigt_to_full(self.effective)),
            "solver": {
                "method": sol.method,
                "converged": sol.converged,
                "iterations": sol.iterations,
                "rank": sol.rank,
                "bond_count": int(sol.c.size),
                "residual_norm": sol.residual_norm,
                "solution_norm": sol.solution_norm,
                "active_set_size": sol.active_set_size,
                "unconstrained_min": sol.unconstrained_min,
                "kkt": sol.kkt,
            },
            "micromoduli": {
                "min": float(sol.c.min()),
                "max": float(sol.c.max()),
                "mean": float(sol.c.mean()),
            },
        }
        if timestamp:
            out["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        return out


def settings_echo(n: Neighborhood, f: InfluenceFunction, opts: SolverOptions, weighted: bool = True) -> dict:
    return {
        "shape": n.shape.describe(n.horizon),
        "spacing": n.spacing,
        "bond_count": len(n),
        "influence": f.describe(),
        "solver": opts.describe(),
        "weighted_metric": weighted,
    }


def calibrate(
    ref: VoigtStiffness,
    n: Neighborhood,
    f: InfluenceFunction,
    opts: Optional[SolverOptions] = None,
    weighted: bool = True,
) -> CalibrationReport:
    """Fit bond micromoduli so that the neighborhood reproduces ``ref``."""
    opts = opts or SolverOptions()
    sys = assemble(n, f, ref, weighted=weighted)
    settings = settings_echo(n, f, opts, weighted)
    try:
        sol = constrained_min_norm(sys, opts)
    except SolverInfeasible as exc:
        diag = {**exc.diagnostics, "settings": settings, "material": ref.name}
        raise CalibrationInfeasible(str(exc), diag) from exc
    eff = effective_stiffness(sys, sol.c, name=ref.name)
    return CalibrationReport(
        material_name=ref.name,
        reference=ref,
        effective=eff,
        micromoduli=sol,
        relative_error=relative_error(ref, eff, weighted=weighted),
        anisotropy_index_ref=_anisotropy_or_none(ref),
        cauchy_residual_ref=cauchy_residual(voigt_to_full(ref)),
        settings=settings,
    )


def projection_oracle(ref: VoigtStiffness) -> VoigtStiffness:
    """Closed-form prediction of the calibrated stiffness: the Cauchy projection."""
    return cauchy_project_voigt(ref)


@dataclass(frozen=True, eq=False)
class RotationVerification:
    """Outcome of calibrating a neighborhood and its transformed copy.

    ``micromoduli_match`` compares bond k of the original with bond k of the
    transformed lattice (xi_k <-> Q xi_k), normalized by the largest
    original micromodulus. ``spatial_match`` compares micromoduli at equal
    bond positions and is None unless Q maps the point set onto itself.
    """

    effective_match: float
    micromoduli_match: float
    in_symmetry_group: bool
    lattice_preserved: bool
    spatial_match: Optional[float]
    original: CalibrationReport
    transformed: CalibrationReport

    def to_dict(self) -> dict:
        return {
            "effective_match": self.effective_match,
            "micromoduli_match": self.micromoduli_match,
            "in_symmetry_group": self.in_symmetry_group,
            "lattice_preserved": self.lattice_preserved,
            "spatial_match": self.spatial_match,
            "relative_error_original": self.original.relative_error,
            "relative_error_transformed": self.transformed.relative_error,
        }


def _max_relative_difference(a: np.ndarray, b: np.ndarray) -> float:
    scale = np.abs(a).max(initial=0.0)
    diff = np.abs(a - b).max(initial=0.0)
    if scale == 0:
        return 0.0 if diff == 0 else np.inf
    return float(diff / scale)


def verify_rotation(
    ref: VoigtStiffness,
    n: Neighborhood,
    f: InfluenceFunction,
    q: OrthogonalTransform,
    opts: Optional[SolverOptions] = None,
    symmetry_tol: float = 1e-6,
) -> RotationVerification:
    """Calibrate ``n`` and ``Q n`` against the same reference and compare."""
    opts = opts or SolverOptions()
    tn = transform_neighborhood(n, q)
    a = calibrate(ref, n, f, opts)
    b = calibrate(ref, tn, f, opts)
    effective_match = tensor_distance(voigt_to_full(b.effective), voigt_to_full(a.effective))
    perm = match_bonds(tn, n)
    spatial = None
    if perm is not None:
        # bond k of the transformed lattice sits where bond perm[k] of the original does
        spatial = _max_relative_difference(a.micromoduli.c[perm], b.micromoduli.c)
    return RotationVerification(
        effective_match=effective_match,
        micromoduli_match=_max_relative_difference(a.micromoduli.c, b.micromoduli.c),
        in_symmetry_group=is_symmetry_transform(voigt_to_full(projection_oracle(ref)), q, symmetry_tol),
        lattice_preserved=perm is not None,
        spatial_match=spatial,
        original=a,
        transformed=b,
    )


@dataclass(frozen=True, eq=False)
class SweepEntry:
    horizon: float
    report: Optional[CalibrationReport]
    error: Optional[str] = None

    @property
    def converged(self) -> bool:
        return self.report is not None


def horizon_sweep(
    ref: VoigtStiffness,
    shape: str,
    horizons: Sequence[float],
    influence: str = "inverse",
    opts: Optional[SolverOptions] = None,
    spacing: float = 1.0,
    exponent: float = 1.5,
) -> list:
    """One calibration per horizon; infeasible horizons are recorded, not raised."""
    out = []
    for h in horizons:
        if h < spacing:
            raise ValueError(f"horizon {h} is smaller than the lattice spacing {spacing}")
        n = build_neighborhood(shape, h, spacing)
        f = InfluenceFunction.for_neighborhood(influence, n, exponent)
        try:
            out.append(SweepEntry(float(h), calibrate(ref, n, f, opts)))
        except CalibrationInfeasible as exc:
            out.append(SweepEntry(float(h), None, str(exc)))
    return out
