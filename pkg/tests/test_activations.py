import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resonant import activations as act
from resonant.errors import EmptyMix, OutOfRange


class TestActivationMix:
    def test_paper_listing_renormalization(self):
        mix = act.ActivationMix({"tanh": 0.1, "relu": 0.9, "sin": 0.05})
        assert mix.probabilities["tanh"] == pytest.approx(0.1 / 1.05)
        assert mix.probabilities["relu"] == pytest.approx(0.9 / 1.05)
        assert mix.probabilities["sin"] == pytest.approx(0.05 / 1.05)

    def test_single_entry(self):
        mix = act.ActivationMix({"tanh": 1})
        assert mix.probabilities == {"tanh": 1.0}

    def test_zero_weights_rejected(self):
        with pytest.raises(EmptyMix):
            act.ActivationMix({"tanh": 0.0, "relu": 0.0})

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            act.ActivationMix({"tanh": -0.1})

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            act.ActivationMix({"sigmoid": 1.0})

    @given(st.dictionaries(
        st.sampled_from(sorted(act.ACTIVATION_IDS)),
        st.floats(0, 10, allow_nan=False),
        min_size=1,
    ).filter(lambda d: sum(d.values()) > 0))
    def test_probabilities_sum_to_one(self, weights):
        mix = act.ActivationMix(weights)
        assert sum(mix.probabilities.values()) == pytest.approx(1.0, abs=1e-12)


class TestAssign:
    def test_single_activation_everywhere(self):
        ids = act.assign(act.ActivationMix({"tanh": 1}), 50, seed=0)
        assert np.all(ids == act.TANH)

    def test_deterministic(self):
        mix = act.ActivationMix({"tanh": 0.5, "relu": 0.5})
        a = act.assign(mix, 1000, seed=3)
        b = act.assign(mix, 1000, seed=3)
        assert np.array_equal(a, b)

    def test_empirical_frequencies(self):
        mix = act.ActivationMix({"tanh": 0.5, "relu": 0.5})
        ids = act.assign(mix, 10000, seed=3)
        frac = np.mean(ids == act.TANH)
        assert abs(frac - 0.5) < 0.02


class TestApply:
    def test_hybrid_inside_linear_band(self):
        assert act.apply(act.HYBRID_RELU_TANH, 0.5, theta_star=1.0) == 0.5

    def test_hybrid_outside_band_is_tanh(self):
        assert act.apply(act.HYBRID_RELU_TANH, 3.0, theta_star=1.0) == pytest.approx(math.tanh(3.0))
        assert act.apply(act.HYBRID_RELU_TANH, -3.0, theta_star=1.0) == pytest.approx(math.tanh(-3.0))

    def test_relu_negative(self):
        assert act.apply(act.RELU, -2.0) == 0.0

    def test_standard_functions(self):
        x = np.linspace(-2, 2, 11)
        assert np.allclose(act.apply(act.TANH, x), np.tanh(x))
        assert np.allclose(act.apply(act.SIN, x), np.sin(x))
        assert np.allclose(act.apply(act.IDENTITY, x), x)

    @given(st.floats(-50, 50, allow_nan=False))
    def test_bounded_or_contractive(self, x):
        assert abs(act.apply(act.TANH, x)) <= 1.0
        assert abs(act.apply(act.SIN, x)) <= 1.0
        assert act.apply(act.RELU, x) <= abs(x)
        assert abs(act.apply(act.HYBRID_RELU_TANH, x, theta_star=1.0)) <= max(1.0, 1.0)


class TestOutputTransform:
    def test_identity_any_direction(self):
        v = np.array([-3.0, 0.0, 7.5])
        assert np.array_equal(act.output_transform("identity", "forward", v), v)
        assert np.array_equal(act.output_transform("identity", "inverse", v), v)

    def test_tanh_zero_fixed_point(self):
        assert act.output_transform("tanh", "forward", 0.0) == 0.0
        assert act.output_transform("tanh", "inverse", 0.0) == 0.0

    def test_tanh_inverse_known_value(self):
        v = act.output_transform("tanh", "inverse", np.array([0.76159415595]))
        assert abs(v[0] - 1.0) < 1e-9

    def test_inverse_of_forward_round_trip(self):
        v = np.linspace(-3, 3, 17)
        back = act.output_transform("tanh", "inverse",
                                    act.output_transform("tanh", "forward", v))
        assert np.allclose(back, v, atol=1e-10)

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            act.output_transform("tanh", "inverse", np.array([1.0]))
        with pytest.raises(OutOfRange):
            act.output_transform("tanh", "inverse", np.array([-1.5]))
