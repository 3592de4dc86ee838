from pathlib import Path

import pytest
from hypothesis import settings

from psadf.modelfile import load_model

ROOT = Path(__file__).resolve().parent.parent
MODELS = ROOT / "models"
DATA = Path(__file__).resolve().parent / "data"

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture(scope="session")
def fig1():
    return load_model(MODELS / "fig1_sdf.txt")


@pytest.fixture(scope="session")
def fig2():
    return load_model(MODELS / "fig2_sadf.txt")


@pytest.fixture(scope="session")
def nested():
    return load_model(MODELS / "psadf_example.txt")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
