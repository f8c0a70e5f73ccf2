from __future__ import annotations

from importlib import resources

import pytest

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    if "test_acceptance" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    outcome = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
    _acceptance_results.append((name, outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_line("")
    terminalreporter.write_line("acceptance criteria:")
    for name, outcome in _acceptance_results:
        terminalreporter.write_line(f"  {outcome}  {name}")


def _template(name: str) -> str:
    return (resources.files("cadkit.pipeline") / "templates" / name).read_text()


@pytest.fixture(scope="session")
def cylinder_json() -> str:
    """Single-part model: one circle loop, one-sided extrusion."""
    return _template("exemplar_1.json")


@pytest.fixture(scope="session")
def prism_json() -> str:
    """Single-part model: 9 lines + 1 arc, rotated -90 about Z and translated."""
    return _template("exemplar_2.json")
