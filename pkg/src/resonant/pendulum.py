"""Forced-pendulum ground truth: fixed-step RK4 integration of

    dx/dt = p
    dp/dt = -sin(x) + force(t)

plus force families, uniform measurement noise, and a resonance flag used
to mask unbounded trajectories.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

FORCE_FAMILIES = ("sin", "sincos")

# Default step sizes: the finer one for the forecasting studies, the coarser
# one for hyper-parameter optimization runs.
DT_FINE = 1.0 / (200.0 * np.pi)
DT_COARSE = 1.0 / (20.0 * np.pi)

RESONANCE_POSITION_LIMIT = np.pi
RESONANCE_GROWTH_FACTOR = 1.5


@dataclass(frozen=True)
class ForceSpec:
    """External driving force: amplitude * sin(w t) or amplitude * sin(w t) cos(w t)."""

    family: str
    amplitude: float
    frequency: float

    def __post_init__(self):
        if self.family not in FORCE_FAMILIES:
            raise ValueError(
                f"unknown force family {self.family!r}; known: {FORCE_FAMILIES}"
            )

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "amplitude": self.amplitude,
            "frequency": self.frequency,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ForceSpec":
        return cls(d["family"], d["amplitude"], d["frequency"])


def force_eval(spec: ForceSpec, t):
    """Evaluate the force at time(s) t."""
    t = np.asarray(t, dtype=np.float64)
    phase = spec.frequency * t
    if spec.family == "sin":
        return spec.amplitude * np.sin(phase)
    return spec.amplitude * np.sin(phase) * np.cos(phase)


@dataclass
class TrajectoryData:
    """Integrator output on the exact grid t_k = t0 + k * dt."""

    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    dt: float
    force: ForceSpec
    x0: float
    p0: float

    def __len__(self) -> int:
        return self.t.shape[0]

    @property
    def targets(self) -> np.ndarray:
        """K x 2 array of (position, momentum) rows."""
        return np.column_stack([self.x, self.p])

    def force_series(self) -> np.ndarray:
        """K x 1 force values on the trajectory's time grid."""
        return force_eval(self.force, self.t)[:, None]

    def slice(self, start: int, stop: int | None = None) -> "TrajectoryData":
        sl = slice(start, stop)
        return replace(self, t=self.t[sl], x=self.x[sl], p=self.p[sl])


def integrate(x0: float, p0: float, dt: float, n_steps: int,
              spec: ForceSpec, t0: float = 0.0) -> TrajectoryData:
    """Classical RK4 over n_steps fixed steps; returns n_steps + 1 samples.

    Times are computed as t0 + k * dt, never by accumulation.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")

    t = t0 + dt * np.arange(n_steps + 1)
    x = np.empty(n_steps + 1)
    p = np.empty(n_steps + 1)
    x[0], p[0] = x0, p0

    half = dt / 2.0
    force_lo = force_eval(spec, t[:-1])
    force_mid = force_eval(spec, t[:-1] + half)
    force_hi = force_eval(spec, t[1:])

    xk, pk = float(x0), float(p0)
    for k in range(n_steps):
        f1 = force_lo[k]
        fh = force_mid[k]
        f2 = force_hi[k]

        k1x = pk
        k1p = -math.sin(xk) + f1
        k2x = pk + half * k1p
        k2p = -math.sin(xk + half * k1x) + fh
        k3x = pk + half * k2p
        k3p = -math.sin(xk + half * k2x) + fh
        k4x = pk + dt * k3p
        k4p = -math.sin(xk + dt * k3x) + f2

        xk = xk + dt * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
        pk = pk + dt * (k1p + 2.0 * k2p + 2.0 * k3p + k4p) / 6.0
        x[k + 1] = xk
        p[k + 1] = pk

    return TrajectoryData(t=t, x=x, p=p, dt=dt, force=spec, x0=x0, p0=p0)


def energy(traj: TrajectoryData) -> np.ndarray:
    """Pendulum energy p^2/2 - cos(x) along the trajectory."""
    return traj.p**2 / 2.0 - np.cos(traj.x)


def add_noise(traj: TrajectoryData, amplitude: float, seed: int) -> TrajectoryData:
    """Perturb x and p by i.i.d. uniform(-amplitude, +amplitude) noise."""
    if amplitude < 0:
        raise ValueError("noise amplitude must be >= 0")
    if amplitude == 0:
        return replace(traj, x=traj.x.copy(), p=traj.p.copy())
    rng = np.random.default_rng(seed)
    k = len(traj)
    return replace(
        traj,
        x=traj.x + rng.uniform(-amplitude, amplitude, size=k),
        p=traj.p + rng.uniform(-amplitude, amplitude, size=k),
    )


def detect_resonance(traj: TrajectoryData) -> bool:
    """Flag trajectories whose motion is not clearly bounded.

    True if the position ever exceeds pi in magnitude, or if the amplitude
    envelope of the final third exceeds the first third's by more than the
    growth factor.
    """
    k = len(traj)
    if k < 3:
        raise ValueError("trajectory too short for resonance detection")
    absx = np.abs(traj.x)
    if absx.max() > RESONANCE_POSITION_LIMIT:
        return True
    third = k // 3
    first = absx[:third].max()
    last = absx[-third:].max()
    return last > RESONANCE_GROWTH_FACTOR * first
