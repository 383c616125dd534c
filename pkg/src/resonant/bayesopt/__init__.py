"""Trust-region Bayesian optimization of reservoir hyper-parameters."""

from .bounds import COORDS, BoundsSpec, decode, encode
from .gp import GpSurrogate
from .objective import (
    PENALTY_SCORE,
    ForecastObjective,
    HpSearchResult,
    optimize_hyperparams,
)
from .turbo import (
    TrialRecord,
    TrustRegionState,
    TurboConfig,
    TurboOptimizer,
    TurboResult,
    propose,
    update_region,
)

__all__ = [
    "COORDS",
    "BoundsSpec",
    "decode",
    "encode",
    "GpSurrogate",
    "PENALTY_SCORE",
    "ForecastObjective",
    "HpSearchResult",
    "optimize_hyperparams",
    "TrialRecord",
    "TrustRegionState",
    "TurboConfig",
    "TurboOptimizer",
    "TurboResult",
    "propose",
    "update_region",
]
