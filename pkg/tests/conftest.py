import numpy as np
import pytest

from byteadapt import _backend, assignment, geometry, threshold
from byteadapt.geometry import BBox
from byteadapt.tracker import Detection


@pytest.fixture(params=_backend.available())
def backend(request, monkeypatch):
    """Run a test once per kernel backend (compiled and pure)."""
    kernels = _backend.load(request.param)
    for module in (geometry, assignment, threshold):
        monkeypatch.setattr(module, "kernels", kernels)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def det(frame, left, top, w, h, score):
    return Detection(frame, BBox(left, top, w, h), score)


from pathlib import Path

DATA = Path(__file__).parent / "data"

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    name, summary = mark.args
    ok, _ = _criteria.get(name, (True, summary))
    _criteria[name] = (ok and rep.passed, summary)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda n: int(n[1:])):
        ok, summary = _criteria[name]
        terminalreporter.write_line(f"{name} {'PASS' if ok else 'FAIL'}  {summary}")
