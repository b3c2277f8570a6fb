from __future__ import annotations

import pytest
from mpmath import mp

from modlaplace import reproduce
from modlaplace.series import Model, anharmonic_coefficients

import reference

DPS = 80


@pytest.fixture(autouse=True)
def _working_precision():
    saved = mp.dps
    mp.dps = DPS
    yield
    mp.dps = saved


@pytest.fixture(scope="session")
def coefficient_cache(tmp_path_factory):
    """Cache file holding A_0..A_249, generated once per session."""
    path = tmp_path_factory.mktemp("coefficients") / "anharmonic.txt"
    anharmonic_coefficients(reproduce.LARGE_ORDER, path)
    return path


@pytest.fixture(scope="session")
def oscillator_249(coefficient_cache):
    """(series, transformed series, stationary points) at N = 249."""
    saved = mp.dps
    mp.dps = DPS
    try:
        series, hs = reproduce.transformed(Model.ANHARMONIC, 249, 2, coefficient_cache)
        points = reproduce.stationary_points(Model.ANHARMONIC, 249, 2, coefficient_cache)
    finally:
        mp.dps = saved
    return series, hs, points


def pytest_terminal_summary(terminalreporter):
    if not reference.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(reference.RESULTS):
        title, ok, detail = reference.RESULTS[number]
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
