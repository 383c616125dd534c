"""Gaussian-process surrogate: Matern-5/2 with per-dimension lengthscales.

Thin wrapper over scikit-learn's exact GP regression. Scores are
standardized to zero mean and unit variance internally; kernel
hyper-parameters are chosen by maximizing the marginal likelihood from
five local-ascent starts. Posterior draws and the marginal-likelihood
gradient are exposed for Thompson sampling and for verification.
"""

from __future__ import annotations

import warnings

import numpy as np
from sklearn.exceptions import ConvergenceWarning
from sklearn.gaussian_process import GaussianProcessRegressor
from sklearn.gaussian_process.kernels import ConstantKernel, Matern, WhiteKernel

from ..errors import DegenerateData

NOISE_FLOOR = 1e-6
JITTER = 1e-10
ML_RESTARTS = 4  # local ascents = 1 initial + 4 restarts


class GpSurrogate:
    """Fitted surrogate over points in the unit cube."""

    def __init__(self, gpr: GaussianProcessRegressor, points: np.ndarray,
                 score_mean: float, score_std: float):
        self._gpr = gpr
        self.points = points
        self.score_mean = score_mean
        self.score_std = score_std

    @classmethod
    def fit(cls, points: np.ndarray, scores: np.ndarray, seed: int = 0, *,
            optimize: bool = True,
            lengthscales: np.ndarray | None = None) -> "GpSurrogate":
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        scores = np.asarray(scores, dtype=np.float64).ravel()
        if points.shape[0] != scores.shape[0]:
            raise ValueError("points and scores disagree in length")
        if points.shape[0] < 2 or np.all(points == points[0]):
            raise DegenerateData(
                "surrogate needs at least 2 distinct points"
            )
        dim = points.shape[1]
        mean = float(scores.mean())
        std = float(scores.std())
        if std == 0.0:
            std = 1.0
        standardized = (scores - mean) / std

        if lengthscales is None:
            lengthscales = np.ones(dim)
        kernel = ConstantKernel(1.0, (1e-3, 1e3)) * Matern(
            length_scale=lengthscales,
            length_scale_bounds=(5e-3, 1e2),
            nu=2.5,
        ) + WhiteKernel(1e-4, (NOISE_FLOOR, 1e-1))
        gpr = GaussianProcessRegressor(
            kernel=kernel,
            alpha=JITTER,
            normalize_y=False,
            optimizer="fmin_l_bfgs_b" if optimize else None,
            n_restarts_optimizer=ML_RESTARTS if optimize else 0,
            random_state=seed,
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            gpr.fit(points, standardized)
        return cls(gpr, points, mean, std)

    @property
    def lengthscales(self) -> np.ndarray:
        return np.atleast_1d(self._gpr.kernel_.k1.k2.length_scale)

    def predict(self, x: np.ndarray):
        """Posterior mean and standard deviation in original score units."""
        mean, std = self._gpr.predict(np.atleast_2d(x), return_std=True)
        return mean * self.score_std + self.score_mean, std * self.score_std

    def sample_joint(self, x: np.ndarray, seed: int) -> np.ndarray:
        """One joint posterior draw over the given points, original units."""
        draw = self._gpr.sample_y(
            np.atleast_2d(x), n_samples=1, random_state=seed
        ).ravel()
        return draw * self.score_std + self.score_mean

    def log_marginal_likelihood(self, theta: np.ndarray | None = None,
                                eval_gradient: bool = False):
        """Marginal likelihood of the standardized scores at kernel
        hyper-parameters theta (log-transformed); defaults to the fitted ones."""
        if theta is None:
            theta = self._gpr.kernel_.theta
        return self._gpr.log_marginal_likelihood(theta, eval_gradient=eval_gradient)

    @property
    def theta(self) -> np.ndarray:
        return self._gpr.kernel_.theta
