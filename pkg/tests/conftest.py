from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("repro", deadline=None, derandomize=True)
settings.load_profile("repro")

DATA = Path(__file__).resolve().parents[1] / "data"
TEST_DATA = Path(__file__).resolve().parent / "data"


@pytest.fixture(scope="session")
def rules_text() -> str:
    return (DATA / "rules.txt").read_text()


@pytest.fixture(scope="session")
def matrix_toy_text() -> str:
    return (DATA / "matrix_toy.txt").read_text()


@pytest.fixture(scope="session")
def matrix_small_text() -> str:
    return (DATA / "matrix_small_set.txt").read_text()
