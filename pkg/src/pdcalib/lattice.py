"""Discrete peridynamic neighborhoods on a regular cubic grid."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .elasticity import OrthogonalTransform, _frozen

SHAPES = ("sphere", "cube", "cuboid", "ellipsoid")
INFLUENCE_KINDS = ("constant", "inverse", "hat", "power")


class HorizonTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class Bond:
    xi: np.ndarray
    length: float
    volume: float


@dataclass(frozen=True)
class Shape:
    """Neighborhood shape.

    ``params`` holds the half-edge (cube), the three half-edges (cuboid) or
    the three semi-axes (ellipsoid), in lattice units. For a sphere it is
    empty and the horizon is the radius.
    """

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in SHAPES:
            raise ValueError(f"unknown shape {self.kind!r}; expected one of {SHAPES}")
        params = tuple(float(p) for p in self.params)
        expected = {"sphere": 0, "cube": 1, "cuboid": 3, "ellipsoid": 3}[self.kind]
        if len(params) != expected:
            raise ValueError(f"{self.kind} takes {expected} parameter(s), got {len(params)}")
        if any(not np.isfinite(p) or p <= 0 for p in params):
            raise ValueError("shape parameters must be positive")
        object.__setattr__(self, "params", params)

    @classmethod
    def default(cls, kind: str, horizon: float) -> "Shape":
        """Default proportions relative to the horizon.

        Cube: side 2*delta. Cuboid: sides 8/6, 10/6 and 2 times delta.
        Ellipsoid: semi-axes 4/6, 5/6 and 1 times delta.
        """
        d = float(horizon)
        if kind == "sphere":
            return cls("sphere")
        if kind == "cube":
            return cls("cube", (d,))
        if kind == "cuboid":
            return cls("cuboid", (8 * d / 6 / 2, 10 * d / 6 / 2, d))
        if kind == "ellipsoid":
            return cls("ellipsoid", (4 * d / 6, 5 * d / 6, d))
        raise ValueError(f"unknown shape {kind!r}; expected one of {SHAPES}")

    def describe(self, horizon: float) -> dict:
        return {"kind": self.kind, "params": list(self.params), "horizon": float(horizon)}


@dataclass(frozen=True, eq=False)
class Neighborhood:
    """Ordered bonds of a single particle.

    Bond vectors ``xi`` are stored as an (M, 3) array; ``lengths`` and
    ``volumes`` are per bond. ``radius`` is the largest distance any point of
    the shape can have from the center, used as the default influence horizon.
    """

    xi: np.ndarray
    lengths: np.ndarray
    volumes: np.ndarray
    shape: Shape
    horizon: float
    spacing: float = 1.0

    def __post_init__(self):
        xi = np.asarray(self.xi, dtype=float)
        if xi.ndim != 2 or xi.shape[1] != 3:
            raise ValueError("bond vectors must have shape (M, 3)")
        object.__setattr__(self, "xi", _frozen(xi))
        object.__setattr__(self, "lengths", _frozen(self.lengths))
        object.__setattr__(self, "volumes", _frozen(self.volumes))
        if self.lengths.shape != (len(xi),) or self.volumes.shape != (len(xi),):
            raise ValueError("lengths and volumes must have one entry per bond")
        if np.any(self.lengths <= 0) or np.any(self.volumes <= 0):
            raise ValueError("bond lengths and volumes must be positive")

    def __len__(self) -> int:
        return len(self.xi)

    @property
    def bond_count(self) -> int:
        return len(self.xi)

    @property
    def bonds(self) -> list:
        return [Bond(x, float(n), float(v)) for x, n, v in zip(self.xi, self.lengths, self.volumes)]

    @property
    def radius(self) -> float:
        p = self.shape.params
        if self.shape.kind == "sphere":
            return float(self.horizon)
        if self.shape.kind == "cube":
            return float(np.sqrt(3.0) * p[0])
        if self.shape.kind == "cuboid":
            return float(np.sqrt(p[0] ** 2 + p[1] ** 2 + p[2] ** 2))
        return float(max(p))

    @property
    def total_volume(self) -> float:
        return float(self.volumes.sum())


def _inside(shape: Shape, pts: np.ndarray, horizon: float, eps: float) -> np.ndarray:
    if shape.kind == "sphere":
        return np.einsum("ij,ij->i", pts, pts) <= horizon * horizon * (1 + eps)
    if shape.kind == "cube":
        return np.abs(pts).max(axis=1) <= shape.params[0] * (1 + eps)
    bounds = np.array(shape.params)
    if shape.kind == "cuboid":
        return np.all(np.abs(pts) <= bounds * (1 + eps), axis=1)
    return np.sum((pts / bounds) ** 2, axis=1) <= 1 + eps


def build_neighborhood(shape, horizon: float, spacing: float = 1.0) -> Neighborhood:
    """All grid offsets (excluding the center) inside ``shape``.

    ``shape`` is a Shape or a shape name; names get the default proportions
    for the given horizon. Points on the boundary are included. Offsets are
    ordered lexicographically on their integer grid coordinates.
    """
    if isinstance(shape, str):
        shape = Shape.default(shape, horizon)
    if horizon <= 0 or spacing <= 0:
        raise ValueError("horizon and spacing must be positive")
    extent = max(shape.params) if shape.params else horizon
    n = int(np.floor(extent / spacing * (1 + 1e-12)))
    if n < 1 or horizon < spacing * (1 - 1e-12):
        raise HorizonTooSmall("horizon too small: no neighbors within the horizon")
    grid = np.array(list(itertools.product(range(-n, n + 1), repeat=3)), dtype=float)
    grid = grid[np.any(grid != 0, axis=1)]
    pts = grid * spacing
    pts = pts[_inside(shape, pts, horizon, 1e-12)]
    if len(pts) == 0:
        raise HorizonTooSmall("horizon too small: no neighbors within the horizon")
    lengths = np.linalg.norm(pts, axis=1)
    volumes = np.full(len(pts), float(spacing) ** 3)
    return Neighborhood(pts, lengths, volumes, shape, float(horizon), float(spacing))


def transform_neighborhood(n: Neighborhood, q: OrthogonalTransform) -> Neighborhood:
    """Apply xi -> Q xi to every bond, keeping order, lengths and volumes."""
    return Neighborhood(n.xi @ q.q.T, n.lengths.copy(), n.volumes.copy(), n.shape, n.horizon, n.spacing)


def match_bonds(a: Neighborhood, b: Neighborhood, tol: float = 1e-6) -> Optional[np.ndarray]:
    """Index map p with b.xi[p[k]] == a.xi[k] (to ``tol``), or None if the point sets differ."""
    if len(a) != len(b):
        return None
    scale = tol * max(a.spacing, 1e-300)
    key_b = {tuple(np.round(x / scale).astype(np.int64)): i for i, x in enumerate(b.xi)}
    perm = np.empty(len(a), dtype=int)
    for k, x in enumerate(a.xi):
        i = key_b.get(tuple(np.round(x / scale).astype(np.int64)))
        if i is None or np.abs(b.xi[i] - x).max() > tol * a.spacing:
            # rounding can split a point across a cell boundary; fall back to a search
            d = np.abs(b.xi - x).max(axis=1)
            i = int(np.argmin(d))
            if d[i] > tol * a.spacing:
                return None
        perm[k] = i
    if len(set(perm.tolist())) != len(perm):
        return None
    return perm


def composed_rotation(theta: float) -> OrthogonalTransform:
    """R = R_x R_y R_z with the same angle about each axis.

    R_y follows the sign pattern [[c, 0, -s], [0, 1, 0], [s, 0, c]].
    """
    c, s = np.cos(theta), np.sin(theta)
    rx = np.array([[1, 0, 0], [0, c, -s], [0, s, c]])
    ry = np.array([[c, 0, -s], [0, 1, 0], [s, 0, c]])
    rz = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    r = rx @ ry @ rz
    # snap rounding noise so that multiples of pi/2 give exact signed permutations
    r[np.abs(r) < 1e-15] = 0.0
    return OrthogonalTransform(r)


def axis_rotation(axis: int, theta: float) -> OrthogonalTransform:
    """Right-handed rotation by ``theta`` about coordinate axis 0, 1 or 2."""
    c, s = np.cos(theta), np.sin(theta)
    i, j = [(1, 2), (2, 0), (0, 1)][axis]
    r = np.eye(3)
    r[i, i] = r[j, j] = c
    r[i, j], r[j, i] = -s, s
    r[np.abs(r) < 1e-15] = 0.0
    return OrthogonalTransform(r)


@dataclass(frozen=True)
class InfluenceFunction:
    kind: str
    horizon: float
    exponent: float = 1.5

    def __post_init__(self):
        if self.kind not in INFLUENCE_KINDS:
            raise ValueError(f"unknown influence function {self.kind!r}; expected one of {INFLUENCE_KINDS}")
        if not self.horizon > 0:
            raise ValueError("influence horizon must be positive")
        if not self.exponent > 0:
            raise ValueError("power-law exponent must be positive")

    @classmethod
    def for_neighborhood(cls, kind: str, n: Neighborhood, exponent: float = 1.5) -> "InfluenceFunction":
        return cls(kind, n.radius, exponent)

    def describe(self) -> dict:
        out = {"kind": self.kind, "horizon": self.horizon}
        if self.kind == "power":
            out["exponent"] = self.exponent
        return out


def influence_value(f: InfluenceFunction, length):
    """Evaluate the influence function at bond length(s) in (0, horizon]."""
    r = np.asarray(length, dtype=float)
    if np.any(r <= 0) or np.any(r > f.horizon * (1 + 1e-12)):
        raise ValueError("bond length outside (0, horizon]")
    ratio = np.minimum(r / f.horizon, 1.0)
    if f.kind == "constant":
        out = np.ones_like(r)
    elif f.kind == "inverse":
        out = 1.0 / ratio
    elif f.kind == "hat":
        out = 1.0 - ratio
    else:
        out = 1.0 - ratio**f.exponent
    return out if out.ndim else float(out)


def neighborhood_rows(n: Neighborhood) -> list:
    """Rows for the neighborhood CSV export."""
    return [
        {"bond_id": k, "xi_x": x[0], "xi_y": x[1], "xi_z": x[2], "length": float(n.lengths[k]), "volume": float(n.volumes[k])}
        for k, x in enumerate(n.xi.tolist())
    ]
