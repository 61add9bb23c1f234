"""Acceptance criteria 1-10.

Each test records its criterion through ``record_property`` so the terminal
summary prints one PASS/FAIL line per criterion. Tolerances are the pinned
ones; failures list every offending case rather than stopping at the first.
"""

import numpy as np
import pytest

from pdcalib import materials
from pdcalib.assembly import analytical_isotropic_micromodulus, assemble
from pdcalib.calibration import CalibrationInfeasible, calibrate, projection_oracle, verify_rotation
from pdcalib.elasticity import (
    VoigtStiffness,
    cauchy_project_voigt,
    cauchy_residual,
    reflection_transform,
    relative_error,
    tensor_distance,
    universal_anisotropy_index,
    voigt_reuss_moduli,
    voigt_to_full,
)
from pdcalib.lattice import InfluenceFunction, SHAPES, INFLUENCE_KINDS, axis_rotation, build_neighborhood, composed_rotation
from pdcalib.solver import SolverOptions, min_norm_least_squares

from conftest import CATALOG_KEYS, calibrated, neighborhood

pytestmark = pytest.mark.acceptance

TABLE_ERRORS = {
    "KIO3": 0.031873,
    "CoTeO4": 0.04988,
    "Te2W": 0.050958,
    "Ta2C": 0.02632,
    "Si": 0.038634,
    "MoN": 0.015335,
    "MgAl2O2": 0.008028,
    "Pyroceram": 0.0,
}
ERROR_TOL = 0.005e-2  # 0.005 percentage points

TABLE_ANISOTROPY = {
    "KIO3": 0.1965,
    "CoTeO4": 28.3169,
    "Te2W": 54.0623,
    "Ta2C": 0.5875,
    "Si": 0.1231,
    "MoN": 0.2551,
    "MgAl2O2": 1.2372,
    "Pyroceram": 0.0,
}

PRINTED_CALIBRATED = {
    "KIO3": [
        [43, 11.67, 13, 1, -2, 2],
        [11.67, 35, 12.67, 3, -0.33, 3],
        [13, 12.67, 43, 2, -2, 0.33],
        [1, 3, 2, 12.67, 0.33, -0.33],
        [-2, -0.33, -2, 0.33, 13, 1],
        [2, 3, 0.33, -0.33, 1, 11.67],
    ],
    "CoTeO4": [
        [135, 18.33, 62, 0, 0, 42],
        [18.33, 13, 14.33, 0, 0, 6],
        [62, 14.33, 269, 0, 0, 22.67],
        [0, 0, 0, 14.33, 22.67, 0],
        [0, 0, 0, 22.67, 62, 0],
        [42, 6, 22.67, 0, 0, 18.33],
    ],
    "Te2W": [
        [143, 1, 43, 0, 0, 0],
        [1, 3, 2.33, 0, 0, 0],
        [43, 2.33, 102, 0, 0, 0],
        [0, 0, 0, 2.33, 0, 0],
        [0, 0, 0, 0, 43, 0],
        [0, 0, 0, 0, 0, 1],
    ],
    "Ta2C": [
        [464, 155, 130.33, -45, 0, 0],
        [155, 464, 130.33, 45, 0, 0],
        [130.33, 130.33, 493, 0, 0, 0],
        [-45, 45, 0, 130.33, 0, 0],
        [0, 0, 0, 0, 130.33, -45],
        [0, 0, 0, 0, -45, 155],
    ],
    "Si": [
        [212, 80, 58, 0, 0, 0],
        [80, 212, 58, 0, 0, 0],
        [58, 58, 179, 0, 0, 0],
        [0, 0, 0, 58, 0, 0],
        [0, 0, 0, 0, 58, 0],
        [0, 0, 0, 0, 0, 80],
    ],
    "MoN": [
        [499, 166.33, 239, 0, 0, 0],
        [166.33, 499, 239, 0, 0, 0],
        [239, 239, 714, 0, 0, 0],
        [0, 0, 0, 239, 0, 0],
        [0, 0, 0, 0, 239, 0],
        [0, 0, 0, 0, 0, 166.33],
    ],
}
PRINTED_CUBIC_OFFDIAG = 143.5


def _report(failures):
    return "; ".join(failures)


def test_criterion_01_table_original_errors(record_property):
    record_property("criterion", "1 Table 1 original-column errors")
    failures = []
    for key, expected in TABLE_ERRORS.items():
        err = calibrated(key).relative_error
        if key == "Pyroceram":
            ok = err <= 1e-8
        else:
            ok = abs(err - expected) <= ERROR_TOL
        print(f"{key:<10} error {err:.6%} expected {expected:.4%} {'ok' if ok else 'MISMATCH'}")
        if not ok:
            failures.append(f"{key}: {err:.6%}")
    assert not failures, _report(failures)


def test_criterion_02_cauchy_imposed_errors(sphere6, record_property):
    record_property("criterion", "2 Table 1 Cauchy-imposed errors")
    f = InfluenceFunction.for_neighborhood("inverse", sphere6)
    failures = []
    for key in CATALOG_KEYS:
        ref = cauchy_project_voigt(materials.get(key).stiffness)
        err = calibrate(ref, sphere6, f).relative_error
        print(f"{key:<10} cauchy-imposed error {err:.3e}")
        if not err <= 1e-8:
            failures.append(f"{key}: {err:.3e}")
    assert not failures, _report(failures)


def test_criterion_03_calibrated_matrix_fixtures(record_property):
    record_property("criterion", "3 calibrated-matrix fixtures")
    failures = []
    for key, printed in PRINTED_CALIBRATED.items():
        eff = calibrated(key).effective.entries
        dev = np.abs(eff - np.array(printed, dtype=float)).max()
        print(f"{key:<10} max entry deviation from printed matrix {dev:.4f} GPa")
        if dev > 0.01:
            failures.append(f"{key}: {dev:.4f} GPa")

    eff = calibrated("MgAl2O2").effective.entries
    off = [eff[0, 1], eff[0, 2], eff[1, 2], eff[3, 3], eff[4, 4], eff[5, 5]]
    dev = np.abs(np.array(off) - 143.0).max()
    print(f"MgAl2O2    max deviation of coupled entries from 143.0: {dev:.4f} GPa")
    if dev > 0.01:
        failures.append(f"MgAl2O2: {dev:.4f} GPa from 143.0")

    # The printed 143.5 is not consistent with the 0.8028 % reported alongside it.
    ref = materials.get("MgAl2O2").stiffness
    printed = eff.copy()
    for a, b in [(0, 1), (0, 2), (1, 2)]:
        printed[a, b] = printed[b, a] = PRINTED_CUBIC_OFFDIAG
    for a in (3, 4, 5):
        printed[a, a] = PRINTED_CUBIC_OFFDIAG
    printed_err = relative_error(ref, VoigtStiffness(printed))
    print(f"MgAl2O2    error implied by printed 143.5: {printed_err:.4%} (reported 0.8028%)")
    if abs(printed_err - TABLE_ERRORS["MgAl2O2"]) <= ERROR_TOL:
        failures.append("printed 143.5 unexpectedly consistent")
    assert not failures, _report(failures)


def test_criterion_04_anisotropy_indices(record_property):
    record_property("criterion", "4 anisotropy indices")
    failures = []
    for key, expected in TABLE_ANISOTROPY.items():
        au = universal_anisotropy_index(materials.get(key).stiffness)
        tol = 1e-9 if key == "Pyroceram" else 1e-3
        print(f"{key:<10} A_U {au:.5f} expected {expected}")
        if abs(au - expected) > tol:
            failures.append(f"{key}: {au:.5f}")
    assert not failures, _report(failures)


def test_criterion_05_isotropic_checks(sphere6, record_property):
    record_property("criterion", "5 analytical isotropic check")
    failures = []
    ref = materials.get("Pyroceram").stiffness
    bulk = voigt_reuss_moduli(ref)["K_V"]
    c_analytic = analytical_isotropic_micromodulus(bulk, 6.0)
    print(f"analytical micromodulus {c_analytic:.5f}")
    if abs(c_analytic - 0.2535) > 1e-4:
        failures.append(f"analytical {c_analytic:.5f}")

    f_const = InfluenceFunction.for_neighborhood("constant", sphere6)
    bounded = calibrate(ref, sphere6, f_const, SolverOptions(lower_bound=0.23))
    mean = bounded.micromoduli.c.mean()
    print(f"constant influence, lower bound 0.23: mean {mean:.5f}")
    if abs(mean - 0.2435) > 0.005:
        failures.append(f"bounded mean {mean:.5f}")

    c = calibrated("Pyroceram").micromoduli.c
    print(f"inverse influence range [{c.min():.5f}, {c.max():.5f}]")
    if c.min() < 0.1726 - 0.002 or c.max() > 0.2076 + 0.002:
        failures.append(f"range [{c.min():.5f}, {c.max():.5f}]")
    assert not failures, _report(failures)


def test_criterion_06_lattice_counts(record_property):
    record_property("criterion", "6 lattice counts")
    cube = len(build_neighborhood("cube", 3.0))
    sphere = len(build_neighborhood("sphere", 6.0))
    print(f"cube half-edge 3: {cube} bonds; sphere 6: {sphere} bonds ({sphere + 1} particles)")
    assert (cube, sphere, sphere + 1) == (342, 924, 925)


def test_criterion_07_horizon_sweep(record_property):
    record_property("criterion", "7 horizon sweep")
    failures = []
    for h in (3.0, 5.0, 7.0):
        for key in CATALOG_KEYS:
            base = calibrated(key).relative_error
            try:
                err = calibrated(key, horizon=h).relative_error
            except CalibrationInfeasible:
                print(f"delta={h:g} {key:<10} infeasible")
                failures.append(f"{key} at delta={h:g} infeasible")
                continue
            if abs(err - base) > 1e-6:
                failures.append(f"{key} at delta={h:g}: {err:.6%}")
    for key, expected in (("KIO3", 0.039036), ("Ta2C", 0.06732)):
        err = calibrated(key, horizon=2.0).relative_error
        print(f"delta=2 {key:<10} error {err:.5%}")
        if abs(err - expected) > ERROR_TOL:
            failures.append(f"{key} at delta=2: {err:.5%}")
    try:
        calibrated("CoTeO4", horizon=2.0)
        failures.append("CoTeO4 at delta=2 converged")
    except CalibrationInfeasible:
        print("delta=2 CoTeO4     infeasible")
    assert not failures, _report(failures)


def test_criterion_08_shape_and_influence(record_property):
    record_property("criterion", "8 shape and influence sweeps")
    failures = []
    for shape in SHAPES:
        for influence in INFLUENCE_KINDS:
            worst = 0.0
            for key in CATALOG_KEYS:
                try:
                    err = calibrated(key, shape=shape, influence=influence).relative_error
                except CalibrationInfeasible:
                    failures.append(f"{key} {shape}/{influence} infeasible")
                    continue
                dev = abs(err - calibrated(key).relative_error)
                worst = max(worst, dev)
                if dev > 1e-6:
                    failures.append(f"{key} {shape}/{influence}: {dev:.2e}")
            print(f"{shape:<9} {influence:<8} worst deviation {worst:.2e}")
    assert not failures, _report(failures)


TRANSFORMS = [("reflect e1", reflection_transform([1, 0, 0])),
              ("reflect e2", reflection_transform([0, 1, 0])),
              ("reflect e3", reflection_transform([0, 0, 1]))]
TRANSFORMS += [(f"equi-angle {k}pi/6", composed_rotation(k * np.pi / 6)) for k in range(1, 7)]


def test_criterion_09_rotation_verification(sphere6, cube3, record_property):
    record_property("criterion", "9 rotation verification")
    failures = []
    f = InfluenceFunction.for_neighborhood("inverse", sphere6)
    for key in CATALOG_KEYS:
        ref = materials.get(key).stiffness
        worst = 0.0
        for label, q in TRANSFORMS:
            try:
                rec = verify_rotation(ref, sphere6, f, q)
            except CalibrationInfeasible:
                failures.append(f"{key} {label} infeasible")
                continue
            worst = max(worst, rec.effective_match)
            if rec.effective_match > 1e-8:
                failures.append(f"{key} {label}: {rec.effective_match:.2e}")
        print(f"{key:<10} worst effective-stiffness distance {worst:.2e}")

    fc = InfluenceFunction.for_neighborhood("inverse", cube3)
    ta2c = materials.get("Ta2C").stiffness
    for k in (1, 2):
        rec = verify_rotation(ta2c, cube3, fc, axis_rotation(2, k * np.pi / 3))
        print(f"Ta2C rotation {k}pi/3 about e3: max micromodulus difference {rec.micromoduli_match:.4%}")
        if rec.micromoduli_match >= 1e-3:
            failures.append(f"Ta2C {k}pi/3: {rec.micromoduli_match:.4%}")

    pyro = materials.get("Pyroceram").stiffness
    for label, q in TRANSFORMS + [("rotate e3 pi/3", axis_rotation(2, np.pi / 3))]:
        rec = verify_rotation(pyro, cube3, fc, q)
        if rec.micromoduli_match >= 1e-8:
            failures.append(f"Pyroceram {label}: {rec.micromoduli_match:.2e}")
    assert not failures, _report(failures)


def _inversion_partner(xi):
    lookup = {tuple(np.round(v, 9)): k for k, v in enumerate(xi)}
    return np.array([lookup[tuple(np.round(-v, 9))] for v in xi])


def test_criterion_10_property_suite(sphere6, record_property):
    record_property("criterion", "10 property suite")
    failures = []
    partner = _inversion_partner(sphere6.xi)
    f = InfluenceFunction.for_neighborhood("inverse", sphere6)
    for key in CATALOG_KEYS:
        ref = materials.get(key).stiffness
        report = calibrated(key)
        c = report.micromoduli.c
        sys = assemble(sphere6, f, ref)

        if np.abs(c - c[partner]).max() > 1e-10 * np.abs(c).max():
            failures.append(f"{key}: inversion symmetry")
        c_ls = min_norm_least_squares(sys)
        r_ls = np.linalg.norm(sys.x @ c_ls - sys.target)
        r_qp = np.linalg.norm(sys.x @ c - sys.target)
        if abs(r_qp - r_ls) > 1e-6 * max(r_ls, np.linalg.norm(sys.target) * 1e-12):
            failures.append(f"{key}: residual changed {r_ls:.6e} -> {r_qp:.6e}")
        if sys.rank() > 15:
            failures.append(f"{key}: rank {sys.rank()}")
        if cauchy_residual(voigt_to_full(report.effective)) > 1e-12:
            failures.append(f"{key}: effective stiffness not fully symmetric")
        again = calibrate(ref, sphere6, f)
        if not np.array_equal(again.micromoduli.c, c):
            failures.append(f"{key}: repeated solve differs")
        dist = tensor_distance(voigt_to_full(report.effective), voigt_to_full(projection_oracle(ref)))
        if dist > 1e-8:
            failures.append(f"{key}: projection oracle distance {dist:.2e}")
    assert not failures, _report(failures)
