"""Echo-state network forecasting with closed-form ridge training and
trust-region Bayesian hyper-parameter optimization, demonstrated on the
forced pendulum.
"""

from .activations import ActivationMix
from .pendulum import ForceSpec, TrajectoryData, add_noise, detect_resonance, integrate
from .reservoir import (
    HiddenStateTrace,
    HyperParams,
    ReservoirModel,
    ReservoirWeights,
    build_weights,
    evolve_states,
)
from .scoring import mse, nmse

__version__ = "0.1.0"

__all__ = [
    "ActivationMix",
    "ForceSpec",
    "TrajectoryData",
    "add_noise",
    "detect_resonance",
    "integrate",
    "HiddenStateTrace",
    "HyperParams",
    "ReservoirModel",
    "ReservoirWeights",
    "build_weights",
    "evolve_states",
    "mse",
    "nmse",
    "__version__",
]
