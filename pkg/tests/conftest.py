from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

from pgrdrc import kernels

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60
)
settings.load_profile("default")


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    """Every importable kernel backend, so both paths stay covered."""
    return kernels.BACKENDS[request.param]


@pytest.fixture(params=sorted(kernels.BACKENDS))
def active_backend(request, monkeypatch):
    """Swap the package-level kernels for the duration of a test."""
    impl = kernels.BACKENDS[request.param]
    for name in ("bin_rects", "gaussian_log_density", "sweep_counts"):
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return request.param


_criteria: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or not mark.args:
        return
    num, title = mark.args
    prev = _criteria.get(num, (title, "PASS"))[1]
    failed = rep.failed or (rep.when == "call" and rep.skipped)
    _criteria[num] = (title, "FAIL" if failed or prev == "FAIL" else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, verdict = _criteria[num]
        terminalreporter.write_line(f"{verdict}  criterion {num}: {title}")
