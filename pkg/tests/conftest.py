import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from riskdynamics import indicator_matrix, load_dataset, standardize

FIXTURE_CSV = Path(__file__).parent / "data" / "synthetic_panel.csv"


@pytest.fixture(scope="session")
def fixture_csv() -> Path:
    return FIXTURE_CSV


@pytest.fixture(scope="session")
def panel():
    return load_dataset(FIXTURE_CSV).dataset


@pytest.fixture(scope="session")
def panel_features(panel):
    features, params = standardize(indicator_matrix(panel))
    return features
