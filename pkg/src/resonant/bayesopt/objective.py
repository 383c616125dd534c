"""Reservoir-fitting objective and the hyper-parameter search entry point.

A candidate is scored by fitting a reservoir on the leading part of the
supplied training window and computing the NMSE on the trailing
continuation. Reservoir blow-ups become a finite penalty score so the
surrogate can steer away from them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    IllConditioned,
    NonFiniteState,
    OutOfRange,
    SingularSpectrum,
    ZeroNormTarget,
)
from ..reservoir import HyperParams, ReservoirModel
from .bounds import BoundsSpec, decode
from .turbo import TurboConfig, TurboOptimizer, TurboResult

PENALTY_SCORE = 1e6
DEFAULT_VALIDATION_FRACTION = 0.3


@dataclass
class ForecastObjective:
    """Score hyper-parameters by NMSE on a validation continuation.

    The final ``validation_fraction`` of the training window is held out;
    earlier rows are fit. Reservoirs are always built with the same seed so
    a candidate's score is reproducible and independent of evaluation
    order.
    """

    targets: np.ndarray
    inputs: np.ndarray | None = None
    feedback: bool = True
    activation_mix: dict = field(default_factory=lambda: {"tanh": 1.0})
    output_activation: str = "identity"
    washout: int | None = None
    validation_fraction: float = DEFAULT_VALIDATION_FRACTION
    seed: int = 0
    criterion: str = "nmse"
    penalty: float = PENALTY_SCORE

    def __post_init__(self):
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.targets.ndim == 1:
            self.targets = self.targets[:, None]
        if self.inputs is not None:
            self.inputs = np.asarray(self.inputs, dtype=np.float64)
            if self.inputs.ndim == 1:
                self.inputs = self.inputs[:, None]
            if self.inputs.shape[0] != self.targets.shape[0]:
                raise ValueError("inputs and targets disagree in length")
        if not 0 < self.validation_fraction < 1:
            raise ValueError("validation_fraction must be in (0, 1)")

    @property
    def split_index(self) -> int:
        return int(round(self.targets.shape[0] * (1.0 - self.validation_fraction)))

    def __call__(self, hps: HyperParams) -> float:
        k = self.split_index
        y_fit, y_val = self.targets[:k], self.targets[k:]
        x_fit = x_val = None
        if self.inputs is not None:
            x_fit, x_val = self.inputs[:k], self.inputs[k:]
        try:
            model = ReservoirModel(
                hps,
                seed=self.seed,
                feedback=self.feedback,
                activation_mix=self.activation_mix,
                output_activation=self.output_activation,
                washout=self.washout,
            ).fit(y_fit, X=x_fit)
            score, _ = model.test(y_val, X=x_val, criterion=self.criterion)
        except (NonFiniteState, IllConditioned, SingularSpectrum,
                OutOfRange, ZeroNormTarget, np.linalg.LinAlgError):
            return self.penalty
        if not np.isfinite(score):
            return self.penalty
        return float(score)


@dataclass
class _PointObjective:
    """Unit-cube adapter so worker processes can pickle the objective."""

    bounds: BoundsSpec
    hp_objective: object

    def __call__(self, point: np.ndarray) -> float:
        return self.hp_objective(decode(point, self.bounds))


@dataclass
class HpSearchResult:
    best_hps: HyperParams
    best_score: float
    trials: list
    turbo: TurboResult


def optimize_hyperparams(
    bounds: BoundsSpec,
    objective,
    n_trust_regions: int,
    max_evals: int,
    initial_samples: int,
    *,
    batch_size: int = 1,
    seed: int = 0,
    n_jobs: int = 1,
    config: TurboConfig | None = None,
    log_hook=None,
    resume_trials=None,
) -> HpSearchResult:
    """Tune hyper-parameters with trust-region Bayesian optimization.

    ``objective`` maps HyperParams to a score (lower is better); use
    ForecastObjective for the reservoir task. Returns the best decoded
    hyper-parameters plus the full trial log.
    """
    optimizer = TurboOptimizer(
        dim=bounds.dim,
        n_trust_regions=n_trust_regions,
        max_evals=max_evals,
        initial_samples=initial_samples,
        batch_size=batch_size,
        seed=seed,
        config=config,
        n_jobs=n_jobs,
        log_hook=log_hook,
    )
    result = optimizer.minimize(
        _PointObjective(bounds, objective), resume_trials=resume_trials
    )
    return HpSearchResult(
        best_hps=decode(result.best_point, bounds),
        best_score=result.best_score,
        trials=result.trials,
        turbo=result,
    )
