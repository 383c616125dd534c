"""Pointwise activation registry and per-node activation assignment.

Reservoir nodes can each use a different activation. A mix assigns
probability weights to activation names; nodes draw their activation
independently from the renormalized weights. The hybrid variant is linear
on ``|x| <= theta_star`` and tanh outside that band.

Output activations are the invertible functions applied to the readout;
only ``identity`` and ``tanh`` are supported there.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyMix, OutOfRange

# Integer codes shared with the compiled kernels.
TANH = 0
RELU = 1
SIN = 2
IDENTITY = 3
HYBRID_RELU_TANH = 4

ACTIVATION_IDS = {
    "tanh": TANH,
    "relu": RELU,
    "sin": SIN,
    "identity": IDENTITY,
    "hybrid_relu_tanh": HYBRID_RELU_TANH,
}
ACTIVATION_NAMES = {code: name for name, code in ACTIVATION_IDS.items()}

OUTPUT_ACTIVATIONS = ("identity", "tanh")

DEFAULT_THETA_STAR = 1.0


class ActivationMix:
    """Probability weights over activation names, renormalized to sum to 1."""

    def __init__(self, weights):
        probs = {}
        for name, w in dict(weights).items():
            if name not in ACTIVATION_IDS:
                raise ValueError(f"unknown activation {name!r}")
            w = float(w)
            if w < 0:
                raise ValueError(f"negative weight for {name!r}")
            if w > 0:
                probs[name] = w
        total = sum(probs.values())
        if total <= 0:
            raise EmptyMix("activation mix has no positive weight")
        if abs(total - 1.0) < 1e-12:
            # already normalized; keep values exactly so persistence of a
            # loaded mix is stable
            self.probabilities = probs
        else:
            self.probabilities = {name: w / total for name, w in probs.items()}

    def __eq__(self, other):
        return (
            isinstance(other, ActivationMix)
            and self.probabilities == other.probabilities
        )

    def __repr__(self):
        return f"ActivationMix({self.probabilities!r})"


def assign(mix: ActivationMix, n_nodes: int, seed: int) -> np.ndarray:
    """Draw one activation code per node; deterministic for a given seed."""
    if n_nodes < 1:
        raise ValueError("n_nodes must be >= 1")
    names = sorted(mix.probabilities)
    probs = np.array([mix.probabilities[name] for name in names])
    codes = np.array([ACTIVATION_IDS[name] for name in names], dtype=np.int8)
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(names), size=n_nodes, p=probs)
    return codes[picks]


def apply(code: int, x, theta_star: float = DEFAULT_THETA_STAR):
    """Evaluate one activation on a scalar or array."""
    x = np.asarray(x, dtype=np.float64)
    if code == TANH:
        return np.tanh(x)
    if code == RELU:
        return np.maximum(x, 0.0)
    if code == SIN:
        return np.sin(x)
    if code == IDENTITY:
        return x.copy()
    if code == HYBRID_RELU_TANH:
        if theta_star <= 0:
            raise ValueError("theta_star must be positive")
        return np.where(np.abs(x) <= theta_star, x, np.tanh(x))
    raise ValueError(f"unknown activation code {code}")


def output_transform(name: str, direction: str, v):
    """Apply an invertible output activation forward or inverse.

    The inverse direction requires values strictly inside the function's
    range; for tanh that means ``|v| < 1``.
    """
    if name not in OUTPUT_ACTIVATIONS:
        raise ValueError(f"unsupported output activation {name!r}")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
    v = np.asarray(v, dtype=np.float64)
    if name == "identity":
        return v.copy()
    if direction == "forward":
        return np.tanh(v)
    if np.any(np.abs(v) >= 1.0):
        raise OutOfRange(
            "inverse tanh requires |v| < 1; tighten the target scaler margin"
        )
    return np.arctanh(v)
