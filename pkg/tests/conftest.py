import numpy as np
import pytest

from wintersynth import kernels
from wintersynth.wavetable import get_bank


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    kernels.warmup()


@pytest.fixture(scope="session")
def bank48():
    return get_bank(48000)


@pytest.fixture()
def rng_np():
    return np.random.default_rng(1234)
