"""Fourth-order elasticity tensor algebra in Voigt and full notation.

Index conventions follow the usual Voigt contraction
1 -> 11, 2 -> 22, 3 -> 33, 4 -> 23, 5 -> 31, 6 -> 12 (zero-based in code).
The default error metric weights the 21 upper-triangle Voigt components so
that it coincides with the Frobenius norm of the full 81-component tensor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

# Voigt index (0..5) -> Cartesian pair
VOIGT_PAIRS = ((0, 0), (1, 1), (2, 2), (1, 2), (2, 0), (0, 1))

# Cartesian pair -> Voigt index
VOIGT_INDEX = np.array([[0, 5, 4], [5, 1, 3], [4, 3, 2]])

# Row-major upper triangle of the 6x6 Voigt matrix: (11,12,...,16,22,...,66)
UPPER_TRIANGLE = tuple((a, b) for a in range(6) for b in range(a, 6))

_MULTIPLICITY = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])

#: Weight of each of the 21 components, m(a) m(b) (2 if a != b else 1).
WEIGHTS_21 = np.array(
    [_MULTIPLICITY[a] * _MULTIPLICITY[b] * (1.0 if a == b else 2.0) for a, b in UPPER_TRIANGLE]
)

_ROWS_21 = np.array([a for a, _ in UPPER_TRIANGLE])
_COLS_21 = np.array([b for _, b in UPPER_TRIANGLE])


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class VoigtStiffness:
    """Symmetric 6x6 stiffness matrix in Voigt notation (GPa).

    Input that is asymmetric by no more than ``tol`` (relative to the largest
    entry) is symmetrized; anything worse raises ``ValueError``.
    """

    entries: np.ndarray
    name: Optional[str] = None
    tol: float = field(default=1e-9, repr=False, compare=False)

    def __post_init__(self):
        c = np.array(self.entries, dtype=float)
        if c.shape != (6, 6):
            raise ValueError(f"Voigt stiffness must be 6x6, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("Voigt stiffness contains non-finite entries")
        scale = np.abs(c).max()
        asym = np.abs(c - c.T).max()
        if scale > 0 and asym > self.tol * scale:
            raise ValueError(
                f"Voigt stiffness is not symmetric (relative asymmetry {asym / scale:.3g} > {self.tol:g})"
            )
        object.__setattr__(self, "entries", _frozen(0.5 * (c + c.T)))

    def __eq__(self, other):
        if not isinstance(other, VoigtStiffness):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None

    def to_vector(self) -> np.ndarray:
        """The 21 upper-triangle components in row-major order."""
        return self.entries[_ROWS_21, _COLS_21].copy()

    @classmethod
    def from_vector(cls, values, name: Optional[str] = None) -> "VoigtStiffness":
        values = np.asarray(values, dtype=float)
        if values.shape != (21,):
            raise ValueError(f"expected 21 components, got shape {values.shape}")
        c = np.zeros((6, 6))
        c[_ROWS_21, _COLS_21] = values
        c[_COLS_21, _ROWS_21] = values
        return cls(c, name=name)

    def with_name(self, name: Optional[str]) -> "VoigtStiffness":
        return VoigtStiffness(self.entries, name=name)


@dataclass(frozen=True)
class FullStiffness:
    """3x3x3x3 stiffness tensor with minor and major symmetries."""

    entries: np.ndarray

    def __post_init__(self):
        c = np.array(self.entries, dtype=float)
        if c.shape != (3, 3, 3, 3):
            raise ValueError(f"full stiffness must be 3x3x3x3, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("full stiffness contains non-finite entries")
        scale = max(np.abs(c).max(), np.finfo(float).tiny)
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if np.abs(c - c.transpose(perm)).max() > 1e-12 * scale:
                raise ValueError("full stiffness violates minor/major symmetry")
        object.__setattr__(self, "entries", _frozen(c))

    def __eq__(self, other):
        if not isinstance(other, FullStiffness):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None


@dataclass(frozen=True)
class OrthogonalTransform:
    """A 3x3 orthogonal matrix (rotation or reflection)."""

    q: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        if q.shape != (3, 3):
            raise ValueError(f"transform must be 3x3, got shape {q.shape}")
        if np.abs(q.T @ q - np.eye(3)).max() > 1e-12:
            raise ValueError("transform is not orthogonal")
        if abs(abs(np.linalg.det(q)) - 1.0) > 1e-12:
            raise ValueError("transform determinant is not +-1")
        object.__setattr__(self, "q", _frozen(q))

    def __eq__(self, other):
        if not isinstance(other, OrthogonalTransform):
            return NotImplemented
        return np.array_equal(self.q, other.q)

    __hash__ = None

    def __matmul__(self, other: "OrthogonalTransform") -> "OrthogonalTransform":
        return OrthogonalTransform(self.q @ other.q)

    @classmethod
    def identity(cls) -> "OrthogonalTransform":
        return cls(np.eye(3))

    @property
    def is_rotation(self) -> bool:
        return np.linalg.det(self.q) > 0


def voigt_to_full(v: VoigtStiffness) -> FullStiffness:
    """Expand a Voigt matrix to the full fourth-order tensor."""
    return FullStiffness(v.entries[np.ix_(VOIGT_INDEX.ravel(), VOIGT_INDEX.ravel())].reshape(3, 3, 3, 3))


def full_to_voigt(c: FullStiffness, name: Optional[str] = None) -> VoigtStiffness:
    idx = [p for p in VOIGT_PAIRS]
    e = c.entries
    out = np.array([[e[i, j, k, l] for (k, l) in idx] for (i, j) in idx])
    return VoigtStiffness(out, name=name)


def rotate_stiffness(c: FullStiffness, q: OrthogonalTransform) -> FullStiffness:
    """Return C'_pqrs = Q_pi Q_qj Q_rk Q_sl C_ijkl."""
    if np.array_equal(q.q, np.eye(3)):
        return c
    out = np.einsum("pi,qj,rk,sl,ijkl->pqrs", q.q, q.q, q.q, q.q, c.entries, optimize=True)
    # restore exact symmetry lost to rounding
    out = (out + out.transpose(1, 0, 2, 3)) / 2
    out = (out + out.transpose(0, 1, 3, 2)) / 2
    out = (out + out.transpose(2, 3, 0, 1)) / 2
    return FullStiffness(out)


def rotate_voigt(v: VoigtStiffness, q: OrthogonalTransform) -> VoigtStiffness:
    return full_to_voigt(rotate_stiffness(voigt_to_full(v), q), name=v.name)


def reflection_transform(n) -> OrthogonalTransform:
    """Householder reflection I - 2 n n^T about the plane with unit normal ``n``."""
    n = np.asarray(n, dtype=float)
    if n.shape != (3,):
        raise ValueError("reflection normal must be a 3-vector")
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise ValueError(f"reflection normal must be a unit vector (|n| = {np.linalg.norm(n)!r})")
    return OrthogonalTransform(np.eye(3) - 2.0 * np.outer(n, n))


def tensor_distance(a: FullStiffness, b: FullStiffness) -> float:
    """Frobenius distance |a - b| / |b| between two full tensors."""
    ref = np.linalg.norm(b.entries)
    diff = np.linalg.norm(a.entries - b.entries)
    if ref == 0:
        return 0.0 if diff == 0 else np.inf
    return float(diff / ref)


def is_symmetry_transform(c: FullStiffness, q: OrthogonalTransform, tol: float = 1e-6) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return tensor_distance(rotate_stiffness(c, q), c) <= tol


def cauchy_residual(c: FullStiffness) -> float:
    """Relative size of the violation of C_ijkl = C_ikjl (0 for fully symmetric tensors)."""
    norm = np.linalg.norm(c.entries)
    if norm == 0:
        return 0.0
    return float(np.linalg.norm(c.entries - c.entries.transpose(0, 2, 1, 3)) / norm)


def cauchy_project(c: FullStiffness) -> FullStiffness:
    """Orthogonal projection onto fully symmetric tensors.

    S_ijkl = (C_ijkl + C_ikjl + C_iljk) / 3, valid for tensors that already
    carry the minor and major symmetries.
    """
    e = c.entries
    t1 = e.transpose(0, 2, 1, 3)
    t2 = e.transpose(0, 3, 2, 1)
    s = (e + t1 + t2) / 3.0
    s = (s + s.transpose(1, 0, 2, 3)) / 2
    s = (s + s.transpose(0, 1, 3, 2)) / 2
    s = (s + s.transpose(2, 3, 0, 1)) / 2
    # entries already satisfying the relations are kept bit-exact
    untouched = (e == t1) & (e == t2)
    return FullStiffness(np.where(untouched, e, s))


def cauchy_project_voigt(v: VoigtStiffness) -> VoigtStiffness:
    return full_to_voigt(cauchy_project(voigt_to_full(v)), name=v.name)


def relative_error(ref: VoigtStiffness, pd: VoigtStiffness, weighted: bool = True) -> float:
    """Relative error |ref - pd| / |ref| over the 21 independent components.

    With ``weighted`` (default) the components carry WEIGHTS_21, which makes
    the norm equal to the Frobenius norm of the full tensor.
    """
    r = ref.to_vector()
    d = r - pd.to_vector()
    w = WEIGHTS_21 if weighted else np.ones(21)
    denom = float(np.sum(w * r * r))
    if denom == 0:
        raise ValueError("reference stiffness is identically zero")
    return float(np.sqrt(np.sum(w * d * d) / denom))


def voigt_reuss_moduli(c: VoigtStiffness) -> dict:
    """Voigt and Reuss bulk and shear moduli."""
    C = c.entries
    try:
        s = np.linalg.inv(C)
    except np.linalg.LinAlgError as exc:
        raise ValueError("stiffness matrix is singular") from exc
    if np.linalg.cond(C) > 1e14:
        raise ValueError("stiffness matrix is singular")
    axial = C[0, 0] + C[1, 1] + C[2, 2]
    coupling = C[0, 1] + C[1, 2] + C[2, 0]
    shear = C[3, 3] + C[4, 4] + C[5, 5]
    s_axial = s[0, 0] + s[1, 1] + s[2, 2]
    s_coupling = s[0, 1] + s[1, 2] + s[2, 0]
    s_shear = s[3, 3] + s[4, 4] + s[5, 5]
    return {
        "K_V": (axial + 2 * coupling) / 9.0,
        "K_R": 1.0 / (s_axial + 2 * s_coupling),
        "G_V": (axial - coupling + 3 * shear) / 15.0,
        "G_R": 15.0 / (4 * s_axial - 4 * s_coupling + 3 * s_shear),
    }


def universal_anisotropy_index(c: VoigtStiffness) -> float:
    """A_U = 5 G_V / G_R + K_V / K_R - 6."""
    m = voigt_reuss_moduli(c)
    return float(5.0 * m["G_V"] / m["G_R"] + m["K_V"] / m["K_R"] - 6.0)
