import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from caussearch.data import CONTINUOUS, Dataset


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def continuous_dataset(named_arrays: dict[str, np.ndarray]) -> Dataset:
    names = tuple(named_arrays)
    cols = tuple(np.asarray(v, dtype=float) for v in named_arrays.values())
    return Dataset(names, tuple(CONTINUOUS for _ in names), cols)


# A frozen ten-row dataset used wherever a hand-checked numeric answer is
# frozen into a test.  Y = 0.8 X - 0.5 Z + e with fixed draws.
FROZEN_X = np.array([0.5, -1.2, 0.3, 2.1, -0.7, 1.4, 0.0, -2.3, 1.1, 0.8])
FROZEN_Z = np.array([1.0, -0.5, 0.2, 1.5, -1.1, 0.7, -0.3, -1.8, 0.9, 0.4])
FROZEN_E = np.array([0.05, -0.12, 0.31, -0.22, 0.17, 0.02, -0.27, 0.09, -0.03, 0.15])
FROZEN_Y = 0.8 * FROZEN_X - 0.5 * FROZEN_Z + FROZEN_E


@pytest.fixture
def frozen_dataset() -> Dataset:
    return continuous_dataset({"X": FROZEN_X, "Y": FROZEN_Y, "Z": FROZEN_Z})
