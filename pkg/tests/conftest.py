import sys
from datetime import datetime, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the shared gen helper

from stylefeed.config import EngineConfig
from stylefeed.program_facts import SourceProgram, parse_program

DATA_DIR = Path(__file__).parent / "data"

FIXED_NOW = datetime(2026, 1, 5, 12, 0, tzinfo=timezone.utc)  # a Monday noon


@pytest.fixture(scope="session")
def mars_text() -> str:
    return (DATA_DIR / "mars_weight.py").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def mars_source(mars_text) -> SourceProgram:
    return SourceProgram(text=mars_text, problem_id="mars_weight.py")


@pytest.fixture(scope="session")
def mars_facts(mars_source):
    return parse_program(mars_source)


@pytest.fixture()
def config() -> EngineConfig:
    return EngineConfig()
