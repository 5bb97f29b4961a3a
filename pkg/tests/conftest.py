import random
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"
DEFAULT_SEED = 20261019


def pytest_addoption(parser):
    parser.addoption("--prop-seed", type=int, default=DEFAULT_SEED,
                     help="seed for the randomized property suites")


@pytest.fixture
def seed(request):
    return request.config.getoption("--prop-seed")


@pytest.fixture
def rng(seed):
    return random.Random(seed)


@pytest.fixture
def data_dir():
    return DATA
