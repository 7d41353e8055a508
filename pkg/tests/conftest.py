import numpy as np
import pytest

from loranbi.channel import NoiseModel
from loranbi.css import LoRaConfig


@pytest.fixture
def sf7():
    return LoRaConfig(7)


@pytest.fixture
def sf12():
    return LoRaConfig(12)


@pytest.fixture
def noise():
    return NoiseModel()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
