import numpy as np
import pytest

from resonant.bayesopt import BoundsSpec, COORDS, decode, encode
from resonant.errors import OutOfBounds
from resonant.reservoir import HyperParams

PAPER_BOUNDS = {
    "log_connectivity": (-2, -0.1),
    "spectral_radius": (0.6, 2),
    "n_nodes": (250, 253),
    "log_regularization": (-3, 3),
    "leaking_rate": (0, 1),
    "bias": (0, 1),
}


@pytest.fixture
def bounds():
    return BoundsSpec(PAPER_BOUNDS)


class TestBoundsSpec:
    def test_dim_and_order(self, bounds):
        assert bounds.dim == 6
        assert COORDS[0] == "log_connectivity"

    def test_missing_coordinate(self):
        broken = dict(PAPER_BOUNDS)
        del broken["bias"]
        with pytest.raises(ValueError, match="missing"):
            BoundsSpec(broken)

    def test_unknown_coordinate(self):
        broken = dict(PAPER_BOUNDS)
        broken["learning_rate"] = (0, 1)
        with pytest.raises(ValueError, match="unknown"):
            BoundsSpec(broken)

    def test_inverted_interval(self):
        broken = dict(PAPER_BOUNDS)
        broken["bias"] = (1, 0)
        with pytest.raises(ValueError):
            BoundsSpec(broken)

    def test_corner_must_decode_to_valid_hps(self):
        broken = dict(PAPER_BOUNDS)
        broken["log_connectivity"] = (-2, 0.5)  # connectivity up to 10^0.5 > 1
        with pytest.raises(ValueError):
            BoundsSpec(broken)

    def test_round_trip_dict(self, bounds):
        clone = BoundsSpec.from_dict(bounds.to_dict())
        assert np.array_equal(clone.lower, bounds.lower)
        assert np.array_equal(clone.upper, bounds.upper)


class TestDecode:
    def test_log_connectivity_map(self, bounds):
        point = np.full(6, 0.5)
        for u in (0.0, 0.3, 1.0):
            point[0] = u
            hps = decode(point, bounds)
            assert hps.connectivity == pytest.approx(10 ** (-2 + u * 1.9))

    def test_n_nodes_endpoint(self, bounds):
        point = np.full(6, 0.5)
        point[2] = 0.0
        assert decode(point, bounds).n_nodes == 250

    def test_n_nodes_rounds(self, bounds):
        point = np.full(6, 0.5)
        point[2] = 0.4  # 250 + 0.4*3 = 251.2 -> 251
        assert decode(point, bounds).n_nodes == 251

    def test_outside_cube_rejected(self, bounds):
        with pytest.raises(ValueError):
            decode(np.full(6, 1.5), bounds)


class TestEncode:
    def test_round_trip_many(self, bounds, rng):
        for _ in range(1000):
            point = rng.uniform(size=6)
            hps = decode(point, bounds)
            back = encode(hps, bounds)
            err = np.abs(back - point)
            # only the n_nodes coordinate may move, by at most half a node
            assert err[[0, 1, 3, 4, 5]].max() < 1e-9
            assert err[2] <= 0.5 / (253 - 250) + 1e-9

    def test_out_of_bounds(self, bounds):
        hps = HyperParams(100, 1.0, 0.3, 0.5, 0.5, 1.0)  # n_nodes below 250
        with pytest.raises(OutOfBounds):
            encode(hps, bounds)
