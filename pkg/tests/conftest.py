import sys
import os

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import numpy as np
import pytest

from boolquad import SdpSolverConfig
from matching_pursuit import FitConfig
from tensor_core import Tensor


def random_tensor(rng: np.random.Generator, dims) -> Tensor:
    """Standard-normal tensor with the given extents."""
    return Tensor.from_array(rng.standard_normal(tuple(dims)))


def random_psd(rng: np.random.Generator, p: int, rank: int | None = None) -> np.ndarray:
    """A = G G^T for a Gaussian G with `rank` columns (default p)."""
    G = rng.standard_normal((p, rank or p))
    return G @ G.T


@pytest.fixture
def rng():
    """Seeded generator; every test gets the same stream."""
    return np.random.default_rng(12345)


@pytest.fixture
def fast_sdp():
    return SdpSolverConfig(max_sweeps=100, tol=1e-6, rounding_trials=30)


@pytest.fixture
def fast_fit(fast_sdp):
    """Small-budget FitConfig for unit tests."""
    return FitConfig(max_atoms=6, sdp=fast_sdp, seed=3)
