import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qgreedy.angles import load_default_angles
from qgreedy.engines import ExpectationCache


@pytest.fixture(scope="session")
def sched_p1():
    return load_default_angles(1).schedule


@pytest.fixture(scope="session")
def sched_p2():
    return load_default_angles(2).schedule


@pytest.fixture(scope="session")
def sched_p3():
    return load_default_angles(3).schedule


# session-wide caches: cone classes recur heavily across tests, and sharing
# the store keeps the ensemble tests from re-simulating the same cones
@pytest.fixture(scope="session")
def cache_p2(sched_p2):
    return ExpectationCache(sched_p2)


@pytest.fixture(scope="session")
def cache_p3(sched_p3):
    return ExpectationCache(sched_p3)
