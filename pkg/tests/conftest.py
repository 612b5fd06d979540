import json
import pathlib

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ga3ph.models import DEFAULT_PARAMS, build_rl_model, reference_model

settings.register_profile("ga3ph", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ga3ph")

ORACLE_PATH = pathlib.Path(__file__).parent / "oracles" / "frozen.json"


@pytest.fixture(scope="session")
def oracle():
    return json.loads(ORACLE_PATH.read_text())


@pytest.fixture(scope="session")
def params():
    return DEFAULT_PARAMS


@pytest.fixture(scope="session")
def unbalanced_mimo():
    return build_rl_model(DEFAULT_PARAMS, balanced=False)


@pytest.fixture(scope="session")
def balanced_mimo():
    return build_rl_model(DEFAULT_PARAMS, balanced=True)


@pytest.fixture(scope="session")
def plant():
    return reference_model().g


@pytest.fixture(scope="session")
def balanced_plant():
    return reference_model(balanced=True).g


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
