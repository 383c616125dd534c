"""Per-channel affine shift+scale transforms used on inputs and targets."""

from __future__ import annotations

import numpy as np


class AffineScaler:
    """Maps each channel of a 2-D series onto [-1 + margin, 1 - margin].

    ``transform`` computes ``(x + shift) * scale`` columnwise. Channels that
    are constant in the fitting data get scale 1; by default they pass
    through unchanged (so a constant-ones input channel stays ones), while
    ``center_constant=True`` shifts them to 0 (needed so constant targets
    stay inside the domain of an invertible output activation).
    """

    def __init__(self, shift: np.ndarray, scale: np.ndarray):
        self.shift = np.asarray(shift, dtype=np.float64)
        self.scale = np.asarray(scale, dtype=np.float64)

    @classmethod
    def fit(cls, data: np.ndarray, margin: float = 0.0, center_constant: bool = False):
        data = np.asarray(data, dtype=np.float64)
        lo = data.min(axis=0)
        hi = data.max(axis=0)
        span = hi - lo
        shift = np.zeros_like(lo)
        scale = np.ones_like(lo)
        moving = span > 0
        half = 1.0 - margin
        # Map [lo, hi] -> [-half, half]: shift to midpoint, scale by span.
        shift[moving] = -(lo[moving] + hi[moving]) / 2.0
        scale[moving] = 2.0 * half / span[moving]
        if center_constant:
            shift[~moving] = -lo[~moving]
        return cls(shift, scale)

    @classmethod
    def identity(cls, n_channels: int):
        return cls(np.zeros(n_channels), np.ones(n_channels))

    @property
    def n_channels(self) -> int:
        return self.shift.shape[0]

    def transform(self, data: np.ndarray) -> np.ndarray:
        return (np.asarray(data, dtype=np.float64) + self.shift) * self.scale

    def inverse(self, data: np.ndarray) -> np.ndarray:
        return np.asarray(data, dtype=np.float64) / self.scale - self.shift

    def to_dict(self) -> dict:
        return {"shift": self.shift.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_dict(cls, d: dict):
        return cls(np.array(d["shift"]), np.array(d["scale"]))
