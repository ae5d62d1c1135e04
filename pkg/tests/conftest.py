from pathlib import Path
import pytest
from harness.fixtures import load_fixtures
from merger.brief import FixtureBriefProvider
from merger.config import NormalizationConfig
from merger.logs import configure_logging

ROOT = Path(__file__).resolve().parent.parent
DEMO_BRIEF = ROOT / "fixtures" / "demo_brief.json"
DEMO_FIXTURES = ROOT / "fixtures" / "demo_fixtures.json"
GOLDEN_RUN = ROOT / "tests" / "golden" / "demo_run.json"

configure_logging("error")


@pytest.fixture
def demo_fixtures():
    return load_fixtures(DEMO_FIXTURES)


@pytest.fixture
def demo_brief():
    return FixtureBriefProvider(path=DEMO_BRIEF).get_brief(NormalizationConfig(total_budget=6))
