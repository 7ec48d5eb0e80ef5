import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracles/gen helpers

from intervaltok import QuantizedScore

DATA = Path(__file__).parent / "data"
GOLDEN = DATA / "golden"


@pytest.fixture(scope="session")
def golden_score() -> QuantizedScore:
    return QuantizedScore.from_json((GOLDEN / "fixture_score.json").read_text())


@pytest.fixture(scope="session")
def golden_dir() -> Path:
    return GOLDEN


def golden_tokens(strategy: str, reference: str | None) -> list[str]:
    name = f"tokens_{strategy}.txt" if reference is None else f"tokens_{strategy}_{reference}.txt"
    return (GOLDEN / name).read_text().split()
