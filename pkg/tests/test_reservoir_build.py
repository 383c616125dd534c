import numpy as np
import pytest

from resonant.errors import SingularSpectrum
from resonant.reservoir import (
    HyperParams,
    build_weights,
    estimate_spectral_radius,
)


def dense_radius(w_res) -> float:
    return float(np.max(np.abs(np.linalg.eigvals(w_res.toarray()))))


class TestHyperParams:
    def test_accepts_paper_listing(self, paper_hps):
        assert paper_hps.n_nodes == 202
        assert paper_hps.connectivity == pytest.approx(0.4071449746896983)

    @pytest.mark.parametrize("field,value", [
        ("n_nodes", 0),
        ("n_nodes", 2.5),
        ("spectral_radius", 0.0),
        ("spectral_radius", -1.0),
        ("connectivity", 0.0),
        ("connectivity", 1.2),
        ("leaking_rate", -0.1),
        ("leaking_rate", 1.1),
        ("regularization", -1e-9),
    ])
    def test_invalid_rejected(self, small_hps, field, value):
        kw = small_hps.to_dict()
        kw[field] = value
        with pytest.raises(ValueError):
            HyperParams(**kw)

    def test_round_trip(self, paper_hps):
        assert HyperParams.from_dict(paper_hps.to_dict()) == paper_hps


class TestBuildWeights:
    def test_paper_listing_spectral_radius(self, paper_hps):
        w = build_weights(paper_hps, 1, seed=210)
        rad = dense_radius(w.w_res)
        assert abs(rad - 1.1329107284545898) / 1.1329107284545898 < 1e-4

    def test_scalar_reservoir(self):
        hps = HyperParams(1, 0.5, 1.0, 0.5, 0.0, 0.1)
        w = build_weights(hps, 1, seed=0)
        assert w.w_res.shape == (1, 1)
        assert abs(w.w_res.toarray()[0, 0]) == pytest.approx(0.5)

    def test_matches_dense_eigensolver(self):
        hps = HyperParams(50, 0.9, 0.2, 0.5, 0.0, 0.1)
        w = build_weights(hps, 1, seed=7)
        assert dense_radius(w.w_res) == pytest.approx(0.9, rel=1e-6)

    def test_connectivity_within_tolerance(self, paper_hps):
        w = build_weights(paper_hps, 1, seed=210)
        n = paper_hps.n_nodes
        assert abs(w.connectivity - paper_hps.connectivity) <= 1.0 / n

    def test_bias_vector(self, small_hps):
        w = build_weights(small_hps, 2, seed=5)
        assert np.array_equal(w.b, np.full(40, small_hps.bias))

    def test_deterministic(self, small_hps):
        a = build_weights(small_hps, 3, seed=11)
        b = build_weights(small_hps, 3, seed=11)
        assert np.array_equal(a.w_in, b.w_in)
        assert np.array_equal(a.w_res.toarray(), b.w_res.toarray())

    def test_seed_changes_weights(self, small_hps):
        a = build_weights(small_hps, 3, seed=11)
        b = build_weights(small_hps, 3, seed=12)
        assert not np.array_equal(a.w_in, b.w_in)

    def test_input_scaling_hook(self, small_hps):
        a = build_weights(small_hps, 3, seed=11)
        b = build_weights(small_hps, 3, seed=11, input_scaling=0.5)
        assert np.allclose(b.w_in, 0.5 * a.w_in)

    def test_all_zero_adjacency_rejected(self):
        hps = HyperParams(10, 0.9, 0.001, 0.5, 0.0, 0.1)  # 0.1 nonzeros -> 0
        with pytest.raises(SingularSpectrum):
            build_weights(hps, 1, seed=0)

    def test_input_dim_validated(self, small_hps):
        with pytest.raises(ValueError):
            build_weights(small_hps, 0, seed=0)


class TestSpectralRadius:
    @pytest.mark.parametrize("n,seed", [(50, 0), (202, 1), (500, 2)])
    def test_matches_dense(self, n, seed):
        hps = HyperParams(n, 1.0, 0.1, 0.5, 0.0, 0.1)
        w = build_weights(hps, 1, seed=seed)
        assert dense_radius(w.w_res) == pytest.approx(1.0, rel=1e-4)

    def test_tiny_matrix_dense_path(self):
        import scipy.sparse as sp
        m = sp.csr_matrix(np.array([[0.0, 2.0], [0.5, 0.0]]))
        assert estimate_spectral_radius(m) == pytest.approx(1.0, rel=1e-9)
