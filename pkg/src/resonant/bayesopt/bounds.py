"""Search-space encoding between hyper-parameters and the unit cube.

Connectivity and regularization are searched in log10 space; n_nodes is
searched as a real and rounded; the rest are linear. Coordinates keep a
fixed canonical order so encoded vectors are comparable across runs.
"""

from __future__ import annotations

import numpy as np

from ..errors import OutOfBounds
from ..reservoir import HyperParams

COORDS = (
    "log_connectivity",
    "spectral_radius",
    "n_nodes",
    "log_regularization",
    "leaking_rate",
    "bias",
)

_LOG_PARAM = {"log_connectivity": "connectivity", "log_regularization": "regularization"}


class BoundsSpec:
    """Closed search interval per coordinate, validated on construction."""

    def __init__(self, intervals: dict):
        missing = set(COORDS) - set(intervals)
        if missing:
            raise ValueError(f"bounds missing coordinates: {sorted(missing)}")
        unknown = set(intervals) - set(COORDS)
        if unknown:
            raise ValueError(f"unknown bound coordinates: {sorted(unknown)}")
        self.lower = np.empty(len(COORDS))
        self.upper = np.empty(len(COORDS))
        for i, name in enumerate(COORDS):
            lo, hi = intervals[name]
            if not lo < hi:
                raise ValueError(f"{name}: lower bound {lo} must be < upper {hi}")
            self.lower[i] = lo
            self.upper[i] = hi
        # Both corners must decode to valid hyper-parameters.
        for corner in (np.zeros(self.dim), np.ones(self.dim)):
            decode(corner, self)

    @property
    def dim(self) -> int:
        return len(COORDS)

    def to_dict(self) -> dict:
        return {
            name: [self.lower[i], self.upper[i]] for i, name in enumerate(COORDS)
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoundsSpec":
        return cls(d)


def decode(point: np.ndarray, bounds: BoundsSpec) -> HyperParams:
    """Map a unit-cube point to hyper-parameters."""
    point = np.asarray(point, dtype=np.float64)
    if point.shape != (bounds.dim,):
        raise ValueError(f"point must have shape ({bounds.dim},), got {point.shape}")
    if np.any(point < 0) or np.any(point > 1):
        raise ValueError("point must lie in the unit cube")
    raw = bounds.lower + point * (bounds.upper - bounds.lower)
    values = {}
    for i, name in enumerate(COORDS):
        if name in _LOG_PARAM:
            values[_LOG_PARAM[name]] = 10.0 ** raw[i]
        elif name == "n_nodes":
            values["n_nodes"] = int(round(raw[i]))
        else:
            values[name] = raw[i]
    return HyperParams(**values)


def encode(hps: HyperParams, bounds: BoundsSpec) -> np.ndarray:
    """Map hyper-parameters to the unit cube; inverse of decode up to
    n_nodes rounding."""
    point = np.empty(bounds.dim)
    for i, name in enumerate(COORDS):
        if name in _LOG_PARAM:
            v = np.log10(getattr(hps, _LOG_PARAM[name]))
        else:
            v = float(getattr(hps, name))
        u = (v - bounds.lower[i]) / (bounds.upper[i] - bounds.lower[i])
        if not -1e-9 <= u <= 1 + 1e-9:
            raise OutOfBounds(
                f"{name}={v} falls outside bounds "
                f"[{bounds.lower[i]}, {bounds.upper[i]}]"
            )
        point[i] = min(max(u, 0.0), 1.0)
    return point
