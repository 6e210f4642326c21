from pathlib import Path

import pytest

ADAPTER_ROOT = Path(__file__).resolve().parent.parent
SAMPLES = ADAPTER_ROOT / "samples"
DATA = ADAPTER_ROOT / "tests" / "data"


@pytest.fixture(scope="session")
def sample_bytes():
    return {p.stem: p.read_bytes() for p in SAMPLES.glob("*.pdf")}


@pytest.fixture(scope="session")
def fixture_bytes():
    return {p.name: p.read_bytes() for p in DATA.iterdir()}
