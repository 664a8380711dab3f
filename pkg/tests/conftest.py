import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ionw", max_examples=40, deadline=None)
settings.load_profile("ionw")

_CRITERIA: dict[int, tuple[str, str, str]] = {}


def random_pure(rng: np.random.Generator, dim: int, real: bool = False) -> np.ndarray:
    v = rng.normal(size=dim)
    if not real:
        v = v + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    if rep.failed and not detail:
        detail = str(call.excinfo.value).splitlines()[0] if call.excinfo else ""
    _CRITERIA[number] = ("PASS" if rep.passed else "FAIL", title, detail)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, title, detail = _CRITERIA[number]
        terminalreporter.write_line(f"[{status}] {number:2d}. {title}: {detail}")
