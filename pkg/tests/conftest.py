import functools

import pytest

from pdcalib import materials
from pdcalib.calibration import calibrate
from pdcalib.lattice import InfluenceFunction, build_neighborhood
from pdcalib.solver import SolverOptions

CATALOG_KEYS = [m.key for m in materials.CATALOG]


@functools.lru_cache(maxsize=None)
def neighborhood(shape="sphere", horizon=6.0):
    return build_neighborhood(shape, horizon)


@functools.lru_cache(maxsize=None)
def calibrated(key, shape="sphere", horizon=6.0, influence="inverse", method="dual"):
    n = neighborhood(shape, horizon)
    f = InfluenceFunction.for_neighborhood(influence, n)
    return calibrate(materials.get(key).stiffness, n, f, SolverOptions(method=method))


@pytest.fixture(scope="session")
def sphere6():
    return neighborhood("sphere", 6.0)


@pytest.fixture(scope="session")
def cube3():
    return neighborhood("cube", 3.0)


@pytest.fixture(params=CATALOG_KEYS)
def material_key(request):
    return request.param


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for name, value in report.user_properties:
        if name == "criterion":
            _ACCEPTANCE[value] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: int(k.split()[0])):
        terminalreporter.write_line(f"criterion {key}: {_ACCEPTANCE[key]}")
