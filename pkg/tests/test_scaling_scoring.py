import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from resonant.errors import ZeroNormTarget
from resonant.scaling import AffineScaler
from resonant.scoring import get_criterion, mse, nmse


class TestAffineScaler:
    def test_maps_to_unit_interval(self, rng):
        data = rng.normal(size=(200, 3)) * np.array([5.0, 0.1, 100.0])
        scaler = AffineScaler.fit(data)
        scaled = scaler.transform(data)
        assert scaled.min() == pytest.approx(-1.0)
        assert scaled.max() == pytest.approx(1.0)

    def test_margin(self, rng):
        data = rng.uniform(-3, 9, size=(50, 2))
        scaler = AffineScaler.fit(data, margin=0.3)
        scaled = scaler.transform(data)
        assert np.abs(scaled).max() == pytest.approx(0.7)

    def test_constant_channel_passthrough(self):
        data = np.column_stack([np.ones(10), np.arange(10.0)])
        scaler = AffineScaler.fit(data)
        scaled = scaler.transform(data)
        assert np.array_equal(scaled[:, 0], np.ones(10))

    def test_constant_channel_centered(self):
        data = np.full((10, 1), 5.0)
        scaler = AffineScaler.fit(data, center_constant=True)
        assert np.array_equal(scaler.transform(data), np.zeros((10, 1)))
        assert np.array_equal(scaler.inverse(scaler.transform(data)), data)

    @given(arrays(np.float64, (20, 2),
                  elements=st.floats(-1e6, 1e6, allow_nan=False)))
    def test_round_trip(self, data):
        scaler = AffineScaler.fit(data)
        back = scaler.inverse(scaler.transform(data))
        assert np.allclose(back, data, atol=1e-12 * (1 + np.abs(data).max()))

    def test_serialization(self, rng):
        data = rng.normal(size=(30, 2))
        scaler = AffineScaler.fit(data)
        clone = AffineScaler.from_dict(scaler.to_dict())
        assert np.array_equal(scaler.transform(data), clone.transform(data))


class TestNmse:
    def test_exact_prediction_scores_zero(self, rng):
        y = rng.normal(size=(50, 2))
        assert nmse(y, y) == 0.0

    def test_footnote_example(self):
        assert nmse(np.array([1.0, 1.0]), np.array([0.0, 0.0])) == 1.0

    def test_matches_direct_formula(self, rng):
        s = rng.normal(size=100)
        p = rng.normal(size=100)
        direct = np.sum((s - p) ** 2) / np.sum(s**2)
        assert nmse(s, p) == pytest.approx(direct, rel=1e-12)

    def test_zero_norm_target(self):
        with pytest.raises(ZeroNormTarget):
            nmse(np.zeros(5), np.ones(5))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            nmse(np.ones(3), np.ones(4))

    def test_mse(self, rng):
        s, p = rng.normal(size=20), rng.normal(size=20)
        assert mse(s, p) == pytest.approx(np.mean((s - p) ** 2))

    def test_criterion_registry(self):
        assert get_criterion("nmse") is nmse
        with pytest.raises(ValueError):
            get_criterion("rmsle")
