import numpy as np
import pytest

from reldecode.codebook import EncodingModel


@pytest.fixture
def two_level():
    return EncodingModel((1.0, 2.0), 1.0)


@pytest.fixture
def close_pair():
    return EncodingModel((1.0, 1.2), 1.0)


def random_model(rng: np.random.Generator, n_max: int = 20) -> EncodingModel:
    n = int(rng.integers(2, n_max + 1))
    tau = tuple(float(t) for t in rng.uniform(0.0, 10.0, n) + 1e-3)
    return EncodingModel(tau, float(rng.uniform(0.1, 3.0)))
