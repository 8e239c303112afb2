import pathlib

import pytest

from uavswarm.engine import run
from uavswarm.model import load_scenario

REPO = pathlib.Path(__file__).resolve().parent.parent
SCENARIOS = REPO / "scenarios"


@pytest.fixture(scope="session")
def fig3_config():
    return load_scenario(SCENARIOS / "fig3_three_users.yaml")


@pytest.fixture(scope="session")
def fig3_result(fig3_config):
    """One qos-mode run of the three-user scenario, shared across tests."""
    return run(fig3_config)
