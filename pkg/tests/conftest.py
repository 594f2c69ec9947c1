import os

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("pmhd", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("pmhd")

from pmhd.engine import LoopPolicy, Pattern  # noqa: E402

ALL_POLICIES = [
    LoopPolicy(Pattern.SIMD_NESTED),
    LoopPolicy(Pattern.MDRANGE, workers=3),
    LoopPolicy(Pattern.FLAT1D, workers=4),
    LoopPolicy(Pattern.TILED_TEAM, workers=2, team_size=3, tile_k=2),
]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def _quiet_thread_warning(recwarn):
    # asking for more workers than cores only time-shares chunks
    yield


def pytest_configure(config):
    os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
