"""Micromodulus calibration for anisotropic bond-based peridynamics."""

__version__ = "0.1.0"

from .assembly import CoefficientSystem, analytical_isotropic_micromodulus, assemble, effective_stiffness
from .calibration import (
    CalibrationInfeasible,
    CalibrationReport,
    calibrate,
    horizon_sweep,
    projection_oracle,
    verify_rotation,
)
from .elasticity import (
    FullStiffness,
    OrthogonalTransform,
    VoigtStiffness,
    cauchy_project,
    cauchy_residual,
    full_to_voigt,
    is_symmetry_transform,
    reflection_transform,
    relative_error,
    rotate_stiffness,
    universal_anisotropy_index,
    voigt_to_full,
)
from .lattice import InfluenceFunction, Neighborhood, Shape, build_neighborhood, composed_rotation, transform_neighborhood
from .solver import MicromoduliSolution, SolverInfeasible, SolverOptions, constrained_min_norm, min_norm_least_squares, null_space_basis
