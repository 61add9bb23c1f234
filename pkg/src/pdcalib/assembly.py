"""Coefficient matrix mapping bond micromoduli to effective Voigt stiffness."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elasticity import UPPER_TRIANGLE, VOIGT_PAIRS, WEIGHTS_21, VoigtStiffness, _frozen
from .lattice import InfluenceFunction, Neighborhood, influence_value

_ALPHA = np.array([a for a, _ in UPPER_TRIANGLE])
_BETA = np.array([b for _, b in UPPER_TRIANGLE])


@dataclass(frozen=True, eq=False)
class CoefficientSystem:
    """Linear system x c ~ target for the micromoduli c.

    When ``weighted`` is set, both ``x`` and ``target`` rows are scaled by
    sqrt(row_weights) so that plain least squares on (x, target) minimizes
    the Frobenius error of the full tensor.
    """

    x: np.ndarray
    target: np.ndarray
    row_weights: np.ndarray
    weighted: bool = True

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen(self.x))
        object.__setattr__(self, "target", _frozen(self.target))
        object.__setattr__(self, "row_weights", _frozen(self.row_weights))
        if self.x.ndim != 2 or self.x.shape[0] != 21:
            raise ValueError("coefficient matrix must have 21 rows")
        if self.target.shape != (21,) or self.row_weights.shape != (21,):
            raise ValueError("target and row weights must have 21 entries")
        if np.any(self.row_weights <= 0):
            raise ValueError("row weights must be positive")

    @property
    def bond_count(self) -> int:
        return self.x.shape[1]

    @property
    def row_scale(self) -> np.ndarray:
        return np.sqrt(self.row_weights) if self.weighted else np.ones(21)

    @property
    def raw(self) -> np.ndarray:
        """Unscaled coefficients: raw @ c gives the 21 Voigt components."""
        return self.x / self.row_scale[:, None]

    def rank(self, rtol=None) -> int:
        s = np.linalg.svd(self.x, compute_uv=False)
        if s.size == 0 or s[0] == 0:
            return 0
        if rtol is None:
            rtol = np.finfo(float).eps * max(self.x.shape)
        return int(np.sum(s > rtol * s[0]))


def bond_products(xi: np.ndarray) -> np.ndarray:
    """zeta_a = xi_i xi_j for each Voigt index a; shape (M, 6)."""
    return np.stack([xi[:, i] * xi[:, j] for i, j in VOIGT_PAIRS], axis=1)


def assemble(n: Neighborhood, f: InfluenceFunction, ref: VoigtStiffness, weighted: bool = True) -> CoefficientSystem:
    """Entry (ab, N) = 1/2 w(|xi|) zeta_a zeta_b dV / |xi|^3 over the 21 Voigt pairs."""
    if len(n) == 0:
        raise ValueError("neighborhood has no bonds")
    if np.any(n.lengths > f.horizon * (1 + 1e-12)):
        raise ValueError(
            f"bond of length {n.lengths.max():.6g} lies outside the influence horizon {f.horizon:.6g}"
        )
    omega = np.asarray(influence_value(f, n.lengths), dtype=float)
    zeta = bond_products(n.xi)
    scale = 0.5 * omega * n.volumes / n.lengths**3
    raw = zeta[:, _ALPHA].T * zeta[:, _BETA].T * scale
    rows = np.sqrt(WEIGHTS_21) if weighted else np.ones(21)
    return CoefficientSystem(rows[:, None] * raw, rows * ref.to_vector(), WEIGHTS_21, weighted)


def effective_vector(sys: CoefficientSystem, c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if c.shape != (sys.bond_count,):
        raise ValueError(f"expected {sys.bond_count} micromoduli, got shape {c.shape}")
    return (sys.x @ c) / sys.row_scale


def effective_stiffness(sys: CoefficientSystem, c, name=None) -> VoigtStiffness:
    """Voigt stiffness produced by micromoduli ``c``."""
    return VoigtStiffness.from_vector(effective_vector(sys, c), name=name)


def analytical_isotropic_micromodulus(bulk_modulus: float, horizon: float) -> float:
    """Constant micromodulus 18 K / (pi delta^4) of a continuous isotropic sphere."""
    if not bulk_modulus > 0 or not horizon > 0:
        raise ValueError("bulk modulus and horizon must be positive")
    return 18.0 * bulk_modulus / (np.pi * horizon**4)
