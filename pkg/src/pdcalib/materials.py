"""Reference stiffness matrices (GPa), one per elastic symmetry class."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elasticity import VoigtStiffness


@dataclass(frozen=True)
class Material:
    key: str
    name: str
    symmetry: str
    voigt: tuple
    aliases: tuple = ()

    @property
    def stiffness(self) -> VoigtStiffness:
        return VoigtStiffness(np.array(self.voigt, dtype=float), name=self.name)


CATALOG = (
    Material(
        "KIO3", "KIO3", "triclinic",
        ((43, 11, 13, 1, -2, 2),
         (11, 35, 12, 3, -1, 3),
         (13, 12, 43, 2, -2, 1),
         (1, 3, 2, 13, 0, 0),
         (-2, -1, -2, 0, 13, 1),
         (2, 3, 1, 0, 1, 12)),
    ),
    Material(
        "CoTeO4", "CoTeO4", "monoclinic",
        ((135, 19, 54, 0, 0, 42),
         (19, 13, 15, 0, 0, 6),
         (54, 15, 269, 0, 0, 18),
         (0, 0, 0, 14, 25, 0),
         (0, 0, 0, 25, 66, 0),
         (42, 6, 18, 0, 0, 18)),
    ),
    Material(
        "Te2W", "Te2W", "orthotropic",
        ((143, 1, 37, 0, 0, 0),
         (1, 3, 3, 0, 0, 0),
         (37, 3, 102, 0, 0, 0),
         (0, 0, 0, 2, 0, 0),
         (0, 0, 0, 0, 46, 0),
         (0, 0, 0, 0, 0, 1)),
    ),
    Material(
        "Ta2C", "Ta2C", "trigonal",
        ((464, 159, 141, -45, 0, 0),
         (159, 464, 141, 45, 0, 0),
         (141, 141, 493, 0, 0, 0),
         (-45, 45, 0, 125, 0, 0),
         (0, 0, 0, 0, 125, -45),
         (0, 0, 0, 0, -45, 153)),
    ),
    Material(
        "Si", "Si", "tetragonal",
        ((212, 70, 58, 0, 0, 0),
         (70, 212, 58, 0, 0, 0),
         (58, 58, 179, 0, 0, 0),
         (0, 0, 0, 58, 0, 0),
         (0, 0, 0, 0, 58, 0),
         (0, 0, 0, 0, 0, 85)),
    ),
    Material(
        "MoN", "MoN", "transversely isotropic",
        ((499, 177, 235, 0, 0, 0),
         (177, 499, 235, 0, 0, 0),
         (235, 235, 714, 0, 0, 0),
         (0, 0, 0, 241, 0, 0),
         (0, 0, 0, 0, 241, 0),
         (0, 0, 0, 0, 0, 161)),
    ),
    Material(
        "MgAl2O2", "MgAl2O2 (spinel)", "cubic",
        ((252, 145, 145, 0, 0, 0),
         (145, 252, 145, 0, 0, 0),
         (145, 145, 252, 0, 0, 0),
         (0, 0, 0, 142, 0, 0),
         (0, 0, 0, 0, 142, 0),
         (0, 0, 0, 0, 0, 142)),
        aliases=("spinel",),
    ),
    Material(
        "Pyroceram", "Pyroceram 9608", "isotropic",
        ((103.2, 34.4, 34.4, 0, 0, 0),
         (34.4, 103.2, 34.4, 0, 0, 0),
         (34.4, 34.4, 103.2, 0, 0, 0),
         (0, 0, 0, 34.4, 0, 0),
         (0, 0, 0, 0, 34.4, 0),
         (0, 0, 0, 0, 0, 34.4)),
        aliases=("Pyroceram9608", "Pyroceram 9608", "Pyroceram-9608"),
    ),
)


def _norm(s: str) -> str:
    return "".join(ch for ch in s.lower() if ch.isalnum())


_LOOKUP = {}
for _m in CATALOG:
    for _k in (_m.key, _m.name, *_m.aliases):
        _LOOKUP[_norm(_k)] = _m


def names() -> list:
    return [m.key for m in CATALOG]


def get(name: str) -> Material:
    try:
        return _LOOKUP[_norm(name)]
    except KeyError:
        raise KeyError(f"unknown material {name!r}; known: {', '.join(names())}") from None
