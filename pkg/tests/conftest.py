from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

from pediloop.opendrive import MapModel, parse_opendrive
from pediloop.worldsim import WorldConfig, load_world_config

DATA_DIR = Path(str(resources.files("pediloop").joinpath("data")))

SCENARIO_NAMES = ("yield_aggressive", "yield_conservative", "ignore")


def data_path(name: str) -> Path:
    return DATA_DIR / name


@pytest.fixture(scope="session")
def bundled_map() -> MapModel:
    return parse_opendrive(data_path("university_crossing.xodr").read_text())


@pytest.fixture(scope="session")
def yield_aggressive_config() -> WorldConfig:
    return load_world_config(data_path("scenario_yield_aggressive.ini"))


@pytest.fixture(scope="session")
def ignore_config() -> WorldConfig:
    return load_world_config(data_path("scenario_ignore.ini"))


@pytest.fixture(scope="session")
def walk_clip_text() -> str:
    return data_path("walk_17joint.bvh").read_text()


# -- acceptance criteria reporting -------------------------------------------

_acceptance_reports: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        name = report.nodeid.split("::", 1)[1]
        _acceptance_reports[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_reports:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in sorted(_acceptance_reports.items()):
        status = "PASS" if outcome == "passed" else outcome.upper()
        terminalreporter.write_line(f"{status}  {name}")
