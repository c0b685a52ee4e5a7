from __future__ import annotations

import functools

import pytest

from gaugecolor.code import build_code
from gaugecolor.lattice import build_lattice


@functools.lru_cache(maxsize=None)
def lattice(family: str, n: int):
    return build_lattice(family, n)


@functools.lru_cache(maxsize=None)
def code(family: str, n: int, d: int, e: int):
    return build_code(lattice(family, n), d, e)


@pytest.fixture(scope="session")
def steane():
    return code("2d", 1, 1, 1)


@pytest.fixture(scope="session")
def rm15():
    """3D n=1 (1,2): the 15-qubit conventional code."""
    return code("3d", 1, 1, 2)


@pytest.fixture(scope="session")
def gauge15():
    """3D n=1 (1,1): the 15-qubit subsystem code."""
    return code("3d", 1, 1, 1)


_CRITERIA: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    _CRITERIA[name] = ("PASS" if report.passed else "FAIL", report.nodeid)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        status, _ = _CRITERIA[name]
        number = name.split("_")[2]
        label = " ".join(name.split("_")[3:])
        terminalreporter.write_line(f"criterion {int(number)}: {status}  ({label})")
