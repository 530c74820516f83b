from pathlib import Path

import pytest

from hoplite import MssTemplate, load_project

DATA = Path(__file__).parent / "data" / "scenario_1"


@pytest.fixture(scope="session")
def scenario_path() -> Path:
    return DATA / "scenario_1.project"


@pytest.fixture(scope="session")
def scenario(scenario_path):
    return load_project(scenario_path)


@pytest.fixture(scope="session")
def scenario_mss() -> MssTemplate:
    # one week, 5 days, 2 sessions/day, 4 h sessions, 10 theatres
    return MssTemplate(weeks=1, daysPerWeek=5, sessionsPerDay=2,
                       sessionHours=4.0, theatres=10)
