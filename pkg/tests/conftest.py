import numpy as np
import pytest

from resonant.reservoir import HyperParams

# Hyper-parameters from the published pure-prediction run.
PAPER_HPS = HyperParams(
    n_nodes=202,
    spectral_radius=1.1329107284545898,
    connectivity=0.4071449746896983,
    leaking_rate=0.009808523580431938,
    bias=0.48509588837623596,
    regularization=1.6862021450927922,
)


@pytest.fixture
def paper_hps():
    return PAPER_HPS


@pytest.fixture
def small_hps():
    return HyperParams(
        n_nodes=40, spectral_radius=0.9, connectivity=0.3,
        leaking_rate=0.5, bias=0.2, regularization=0.1,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
