import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURE_DIR = Path(__file__).parent.parent / "fixtures"


@pytest.fixture(scope="session")
def fixture_dir():
    if not FIXTURE_DIR.exists():
        pytest.skip("fixture directory not generated")
    return FIXTURE_DIR
