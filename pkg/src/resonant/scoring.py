"""Forecast scoring criteria."""

from __future__ import annotations

import numpy as np

from .errors import ZeroNormTarget


def nmse(target: np.ndarray, prediction: np.ndarray) -> float:
    """Normalized mean squared error: sum((s - s_hat)^2) / sum(s^2).

    Summation runs over every step and channel. This is the error the
    forecasting experiments report.
    """
    target = np.asarray(target, dtype=np.float64)
    prediction = np.asarray(prediction, dtype=np.float64)
    if target.shape != prediction.shape:
        raise ValueError(f"shape mismatch {target.shape} vs {prediction.shape}")
    norm = float(np.sum(target**2))
    if norm == 0.0:
        raise ZeroNormTarget("target series has zero squared norm; NMSE undefined")
    return float(np.sum((target - prediction) ** 2)) / norm


def mse(target: np.ndarray, prediction: np.ndarray) -> float:
    """Plain mean squared error over every step and channel."""
    target = np.asarray(target, dtype=np.float64)
    prediction = np.asarray(prediction, dtype=np.float64)
    if target.shape != prediction.shape:
        raise ValueError(f"shape mismatch {target.shape} vs {prediction.shape}")
    return float(np.mean((target - prediction) ** 2))


CRITERIA = {"nmse": nmse, "mse": mse}


def get_criterion(name: str):
    try:
        return CRITERIA[name]
    except KeyError:
        raise ValueError(f"unknown criterion {name!r}; known: {sorted(CRITERIA)}") from None
