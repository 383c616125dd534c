"""Frozen random reservoirs with a closed-form ridge readout.

The model follows the leaky echo-state recurrence

    h_k = (1 - alpha) * h_{k-1} + alpha * f(W_res h_{k-1} + W_in u_k + b)

with fixed random W_in, W_res, b and a readout s_hat = g(W_out h + c)
trained in one shot by ridge regression. With ``feedback=True`` the scaled
target, shifted by one step, is appended to the input channels during
training (teacher forcing) and the model's own scaled prediction is fed
back during autonomous prediction.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sparse
import scipy.sparse.linalg as splinalg

from . import activations as act
from . import kernels
from .errors import (
    DimensionMismatch,
    IllConditioned,
    NonFiniteState,
    SingularSpectrum,
)
from .scaling import AffineScaler
from .scoring import get_criterion

MODEL_FORMAT = "resonant-model/1"

SPECTRAL_TOL = 0.0  # ARPACK: 0 = machine precision; looser tolerances
                    # let a wrong Ritz value pass as converged
SPECTRAL_MAX_ITER = 1000
_DENSE_EIG_CUTOFF = 8  # below this ARPACK cannot run (needs k < N - 1)

# Margin pulling scaled targets inside a bounded output activation's range.
# Razor-thin margins push the inverse-activation targets to extreme values
# and destabilize the closed prediction loop, so this stays generous.
OUTPUT_MARGIN = 0.3


@dataclass(frozen=True)
class HyperParams:
    """The six tunable numbers governing reservoir architecture and ridge fit."""

    n_nodes: int
    spectral_radius: float
    connectivity: float
    leaking_rate: float
    bias: float
    regularization: float

    def __post_init__(self):
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 1:
            raise ValueError(f"n_nodes must be a positive integer, got {self.n_nodes}")
        if not self.spectral_radius > 0:
            raise ValueError(f"spectral_radius must be > 0, got {self.spectral_radius}")
        if not 0 < self.connectivity <= 1:
            raise ValueError(f"connectivity must be in (0, 1], got {self.connectivity}")
        if not 0 <= self.leaking_rate <= 1:
            raise ValueError(f"leaking_rate must be in [0, 1], got {self.leaking_rate}")
        if not self.regularization >= 0:
            raise ValueError(f"regularization must be >= 0, got {self.regularization}")
        object.__setattr__(self, "n_nodes", int(self.n_nodes))
        for name in ("spectral_radius", "connectivity", "leaking_rate",
                     "bias", "regularization"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def to_dict(self) -> dict:
        return {
            "n_nodes": self.n_nodes,
            "spectral_radius": self.spectral_radius,
            "connectivity": self.connectivity,
            "leaking_rate": self.leaking_rate,
            "bias": self.bias,
            "regularization": self.regularization,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HyperParams":
        return cls(**{k: d[k] for k in (
            "n_nodes", "spectral_radius", "connectivity",
            "leaking_rate", "bias", "regularization")})


class ReservoirWeights:
    """Fixed input/adjacency/bias matrices plus the trained readout.

    w_in, w_res and b are frozen at construction; w_out and c are absent
    until a model is fit.
    """

    def __init__(self, w_in, w_res, b, activation_ids, w_out=None, c=None):
        self.w_in = np.asarray(w_in, dtype=np.float64)
        self.w_res = w_res.tocsr() if not sparse.isspmatrix_csr(w_res) else w_res
        self.w_res.sort_indices()
        self.b = np.asarray(b, dtype=np.float64)
        self.activation_ids = np.asarray(activation_ids, dtype=np.int8)
        self.w_out = None if w_out is None else np.asarray(w_out, dtype=np.float64)
        self.c = None if c is None else np.asarray(c, dtype=np.float64)

    @property
    def n_nodes(self) -> int:
        return self.w_in.shape[0]

    @property
    def input_dim(self) -> int:
        return self.w_in.shape[1]

    @property
    def connectivity(self) -> float:
        return self.w_res.nnz / self.n_nodes**2


@dataclass
class HiddenStateTrace:
    """Sequence of hidden states h_1..h_K plus the state they started from."""

    states: np.ndarray
    initial_state: np.ndarray
    washout: int = 0

    @property
    def washed(self) -> np.ndarray:
        return self.states[self.washout:]


def estimate_spectral_radius(w, tol: float = SPECTRAL_TOL,
                             max_iter: int = SPECTRAL_MAX_ITER) -> float:
    """Magnitude of the dominant eigenvalue of a (sparse) square matrix.

    Uses an iterative Krylov solver with the deterministic start vector
    1/sqrt(N); tiny matrices and non-converged cases fall back to a dense
    eigendecomposition.
    """
    n = w.shape[0]
    if n < _DENSE_EIG_CUTOFF:
        dense = w.toarray() if sparse.issparse(w) else np.asarray(w)
        return float(np.max(np.abs(np.linalg.eigvals(dense))))
    v0 = np.full(n, 1.0 / np.sqrt(n))
    try:
        # k=3: a complex-conjugate dominant pair cannot be isolated with k=1
        vals = splinalg.eigs(
            w, k=3, which="LM", v0=v0, maxiter=max_iter, tol=tol,
            return_eigenvectors=False,
        )
        return float(np.max(np.abs(vals)))
    except (splinalg.ArpackNoConvergence, splinalg.ArpackError, ValueError):
        dense = w.toarray() if sparse.issparse(w) else np.asarray(w)
        return float(np.max(np.abs(np.linalg.eigvals(dense))))


def build_weights(hps: HyperParams, input_dim: int, seed: int, *,
                  input_scaling: float = 1.0,
                  activation_ids: np.ndarray | None = None) -> ReservoirWeights:
    """Construct frozen random weights for the given hyper-parameters.

    The adjacency gets round(connectivity * N^2) nonzeros at distinct
    uniformly-chosen positions with uniform(-1, 1) values, then is rescaled
    so its dominant eigenvalue magnitude equals spectral_radius. Input
    weights are uniform(-1, 1) times ``input_scaling``; the bias vector is
    the bias hyper-parameter replicated. Deterministic per seed.
    """
    if input_dim < 1:
        raise ValueError(f"input_dim must be >= 1, got {input_dim}")
    n = hps.n_nodes
    n_nonzero = int(round(hps.connectivity * n * n))
    if n_nonzero == 0:
        raise SingularSpectrum(
            f"connectivity {hps.connectivity} with n_nodes {n} rounds to an "
            "all-zero adjacency; increase connectivity or n_nodes"
        )

    rng = np.random.default_rng(seed)
    positions = rng.choice(n * n, size=n_nonzero, replace=False)
    values = rng.uniform(-1.0, 1.0, size=n_nonzero)
    w_in = input_scaling * rng.uniform(-1.0, 1.0, size=(n, input_dim))

    rows = (positions // n).astype(np.int32)
    cols = (positions % n).astype(np.int32)
    w_res = sparse.coo_matrix((values, (rows, cols)), shape=(n, n)).tocsr()
    w_res.sort_indices()

    radius = estimate_spectral_radius(w_res)
    if radius <= 1e-12:
        raise SingularSpectrum(
            "adjacency has spectral radius 0 (nilpotent placement); "
            "increase connectivity or n_nodes"
        )
    w_res = w_res * (hps.spectral_radius / radius)
    w_res.indices = w_res.indices.astype(np.int32, copy=False)
    w_res.indptr = w_res.indptr.astype(np.int32, copy=False)

    b = np.full(n, float(hps.bias))
    if activation_ids is None:
        activation_ids = np.full(n, act.TANH, dtype=np.int8)
    return ReservoirWeights(w_in, w_res, b, activation_ids)


def evolve_states(weights: ReservoirWeights, inputs: np.ndarray, h0: np.ndarray,
                  leaking_rate: float, theta_star: float = act.DEFAULT_THETA_STAR,
                  ) -> HiddenStateTrace:
    """Run the leaky recurrence over an input series, starting from h0."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    if inputs.shape[1] != weights.input_dim:
        raise DimensionMismatch(
            f"inputs have {inputs.shape[1]} channels, weights were built "
            f"for {weights.input_dim}"
        )
    h0 = np.asarray(h0, dtype=np.float64)
    if not np.all(np.isfinite(h0)):
        raise ValueError("h0 must be finite")
    proj = inputs @ weights.w_in.T + weights.b
    states = kernels.reservoir_states(
        weights.w_res, proj, h0, leaking_rate, weights.activation_ids, theta_star
    )
    if not np.all(np.isfinite(states)):
        raise NonFiniteState(
            "hidden states became non-finite; the reservoir is unstable "
            "for these hyper-parameters"
        )
    return HiddenStateTrace(states=states, initial_state=h0, washout=0)


def solve_readout(states_aug: np.ndarray, targets: np.ndarray, beta: float) -> np.ndarray:
    """Solve the ridge-regularized readout in one shot.

    states_aug is the washed-out state matrix with a trailing constant-1
    column; the returned (N+1) x P matrix stacks W_out rows over the bias
    row. The bias column is exempt from the ridge penalty.
    """
    states_aug = np.asarray(states_aug, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if beta == 0:
        # Unregularized: the normal equations square the conditioning, so
        # use a backward-stable least-squares solve and police the rank.
        solution, _, rank, svals = np.linalg.lstsq(states_aug, targets, rcond=None)
        condition = float(svals[0] / svals[-1]) if svals[-1] > 0 else np.inf
        if rank < states_aug.shape[1]:
            raise IllConditioned(
                "state matrix is rank-deficient at beta=0 "
                f"(condition estimate {condition:.3e}); increase regularization",
                condition=condition,
            )
    else:
        gram = states_aug.T @ states_aug
        reg = np.full(gram.shape[0], float(beta))
        reg[-1] = 0.0
        gram[np.diag_indices_from(gram)] += reg
        rhs = states_aug.T @ targets
        try:
            factor = scipy.linalg.cho_factor(gram)
            solution = scipy.linalg.cho_solve(factor, rhs)
        except scipy.linalg.LinAlgError:
            raise IllConditioned(
                "regularized Gram matrix is not positive definite "
                f"(condition estimate {np.linalg.cond(gram):.3e}); "
                "increase regularization",
                condition=float(np.linalg.cond(gram)),
            ) from None
    if not np.all(np.isfinite(solution)):
        raise IllConditioned(
            "readout solve produced non-finite coefficients",
            condition=float(np.linalg.cond(gram)),
        )
    return solution


def default_washout(n_samples: int) -> int:
    return min(100, n_samples // 10)


class ReservoirModel:
    """Echo-state network with one-shot ridge training.

    Parameters mirror the hyper-parameter table plus the architectural
    flags: ``feedback`` wires the (scaled) target back into the input
    channels, ``activation_mix`` assigns per-node activations, and
    ``output_activation`` ('identity' or 'tanh') is applied invertibly to
    the readout. Identical (hyperparams, seed, data) give bit-identical
    models and predictions.
    """

    def __init__(self, hyperparams: HyperParams, seed: int, *,
                 feedback: bool = False,
                 activation_mix="tanh",
                 output_activation: str = "identity",
                 washout: int | None = None,
                 input_scaling: float = 1.0,
                 theta_star: float = act.DEFAULT_THETA_STAR,
                 output_margin: float = OUTPUT_MARGIN):
        if isinstance(activation_mix, str):
            activation_mix = act.ActivationMix({activation_mix: 1.0})
        elif isinstance(activation_mix, dict):
            activation_mix = act.ActivationMix(activation_mix)
        if output_activation not in act.OUTPUT_ACTIVATIONS:
            raise ValueError(f"unsupported output activation {output_activation!r}")
        if washout is not None and washout < 0:
            raise ValueError("washout must be >= 0")
        self.hyperparams = hyperparams
        self.seed = int(seed)
        self.feedback = bool(feedback)
        self.activation_mix = activation_mix
        self.output_activation = output_activation
        self.washout = washout
        self.input_scaling = float(input_scaling)
        self.theta_star = float(theta_star)
        self.output_margin = float(output_margin)
        self.weights: ReservoirWeights | None = None
        self.input_scaler: AffineScaler | None = None
        self.target_scaler: AffineScaler | None = None
        self.channel_names: list[str] | None = None
        self._h_end = None
        self._fb_seed = None
        self._n_exog = None
        self._n_outputs = None
        self._washout_used = None
        self.train_score = None

    # -- training -----------------------------------------------------------

    def fit(self, y: np.ndarray, X: np.ndarray | None = None) -> "ReservoirModel":
        """Build states over the training window and solve the readout.

        y is the K x P target series; X the optional K x M input series.
        Without X the input defaults to a constant-ones channel.
        """
        y = self._as_2d(y)
        n_samples, n_outputs = y.shape
        hps = self.hyperparams
        if n_samples < 2:
            raise ValueError("need at least 2 training samples")
        if n_samples < hps.n_nodes / 2:
            warnings.warn(
                f"only {n_samples} training samples for {hps.n_nodes} nodes; "
                "K >= N/2 is recommended",
                stacklevel=2,
            )

        margin = self.output_margin if self.output_activation == "tanh" else 0.0
        self.target_scaler = AffineScaler.fit(y, margin=margin, center_constant=True)
        y_scaled = self.target_scaler.transform(y)

        if X is None:
            exog = np.ones((n_samples, 1))
            self.input_scaler = AffineScaler.identity(1)
        else:
            exog = self._as_2d(X)
            if exog.shape[0] != n_samples:
                raise ValueError(
                    f"X has {exog.shape[0]} rows but y has {n_samples}"
                )
            self.input_scaler = AffineScaler.fit(exog)
        exog_scaled = self.input_scaler.transform(exog)
        self._n_exog = exog_scaled.shape[1]
        self._n_outputs = n_outputs

        if self.feedback:
            shifted = np.vstack([y_scaled[:1], y_scaled[:-1]])
            full_inputs = np.hstack([exog_scaled, shifted])
        else:
            full_inputs = exog_scaled

        ids = act.assign(self.activation_mix, hps.n_nodes, self.seed + 1)
        self.weights = build_weights(
            hps, full_inputs.shape[1], self.seed,
            input_scaling=self.input_scaling, activation_ids=ids,
        )

        trace = evolve_states(
            self.weights, full_inputs, np.zeros(hps.n_nodes),
            hps.leaking_rate, self.theta_star,
        )
        wash = default_washout(n_samples) if self.washout is None else self.washout
        wash = min(wash, n_samples - 1)
        self._washout_used = wash

        targets_z = act.output_transform(self.output_activation, "inverse", y_scaled)
        states_aug = np.hstack([
            trace.states[wash:], np.ones((n_samples - wash, 1)),
        ])
        solution = solve_readout(states_aug, targets_z[wash:], hps.regularization)
        self.weights.w_out = np.ascontiguousarray(solution[:-1].T)
        self.weights.c = np.ascontiguousarray(solution[-1])

        self._h_end = trace.states[-1].copy()
        self._fb_seed = y_scaled[-1].copy()

        train_pred = self._readout(trace.states[wash:])
        self.train_score = get_criterion("nmse")(y[wash:], train_pred)
        return self

    @property
    def is_fitted(self) -> bool:
        return self.weights is not None and self.weights.w_out is not None

    def _readout(self, states: np.ndarray) -> np.ndarray:
        z = states @ self.weights.w_out.T + self.weights.c
        s = act.output_transform(self.output_activation, "forward", z)
        return self.target_scaler.inverse(s)

    # -- inference ----------------------------------------------------------

    def predict(self, X: np.ndarray | None = None,
                n_steps: int | None = None) -> np.ndarray:
        """Predict forward from the end of training, in original units.

        With feedback, each step's prediction is fed back as input for the
        next, seeded by the final training target. Stateless: repeated
        calls start from the same end-of-training state.
        """
        self._require_fitted()
        if X is not None:
            X = self._as_2d(X)
            if X.shape[1] != self._n_exog:
                raise DimensionMismatch(
                    f"X has {X.shape[1]} channels, model was fit with {self._n_exog}"
                )
            if n_steps is not None and n_steps != X.shape[0]:
                raise ValueError("n_steps conflicts with the length of X")
            n_steps = X.shape[0]
        if n_steps is None:
            raise ValueError("n_steps is required when X is omitted")
        if n_steps < 0:
            raise ValueError("n_steps must be >= 0")
        if n_steps == 0:
            return np.empty((0, self._n_outputs))

        exog = np.ones((n_steps, 1)) if X is None else X
        exog_scaled = self.input_scaler.transform(exog)
        w = self.weights
        out_tanh = self.output_activation == "tanh"

        if not self.feedback:
            trace = evolve_states(
                w, exog_scaled, self._h_end,
                self.hyperparams.leaking_rate, self.theta_star,
            )
            return self._readout(trace.states)

        w_in_exog = w.w_in[:, : self._n_exog]
        w_in_fb = w.w_in[:, self._n_exog:]
        proj = exog_scaled @ w_in_exog.T + w.b
        preds_scaled, _ = kernels.feedback_rollout(
            w.w_res, proj, w_in_fb, self._h_end,
            self.hyperparams.leaking_rate, w.activation_ids, self.theta_star,
            w.w_out, w.c, out_tanh, self._fb_seed,
        )
        if not np.all(np.isfinite(preds_scaled)):
            raise NonFiniteState(
                "feedback prediction became non-finite; the reservoir is "
                "unstable for these hyper-parameters"
            )
        return self.target_scaler.inverse(preds_scaled)

    def test(self, y: np.ndarray, X: np.ndarray | None = None,
             criterion: str = "nmse"):
        """Predict over the length of y and score against it.

        y is never visible to predict; it only sets the horizon and the
        ground truth for the score. Returns (score, prediction).
        """
        y = self._as_2d(y)
        score_fn = get_criterion(criterion)
        prediction = self.predict(X=X, n_steps=y.shape[0])
        return score_fn(y, prediction), prediction

    # -- persistence ---------------------------------------------------------

    def to_dict(self) -> dict:
        self._require_fitted()
        w = self.weights
        coo = w.w_res.tocoo()
        return {
            "format": MODEL_FORMAT,
            "hyperparams": self.hyperparams.to_dict(),
            "seed": self.seed,
            "feedback": self.feedback,
            "activation_mix": self.activation_mix.probabilities,
            "output_activation": self.output_activation,
            "theta_star": self.theta_star,
            "input_scaling": self.input_scaling,
            "output_margin": self.output_margin,
            "washout": self._washout_used,
            "n_exog": self._n_exog,
            "n_outputs": self._n_outputs,
            "channel_names": self.channel_names,
            "train_score": self.train_score,
            "input_scaler": self.input_scaler.to_dict(),
            "target_scaler": self.target_scaler.to_dict(),
            "activation_ids": w.activation_ids.tolist(),
            "w_in": w.w_in.tolist(),
            "b": w.b.tolist(),
            "w_out": w.w_out.tolist(),
            "c": w.c.tolist(),
            "w_res": {
                "shape": list(w.w_res.shape),
                "rows": coo.row.tolist(),
                "cols": coo.col.tolist(),
                "values": coo.data.tolist(),
            },
            "h_end": self._h_end.tolist(),
            "fb_seed": self._fb_seed.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReservoirModel":
        if d.get("format") != MODEL_FORMAT:
            raise ValueError(
                f"unsupported model format {d.get('format')!r}, "
                f"expected {MODEL_FORMAT!r}"
            )
        model = cls(
            HyperParams.from_dict(d["hyperparams"]),
            d["seed"],
            feedback=d["feedback"],
            activation_mix=d["activation_mix"],
            output_activation=d["output_activation"],
            washout=d["washout"],
            input_scaling=d["input_scaling"],
            theta_star=d["theta_star"],
            output_margin=d.get("output_margin", OUTPUT_MARGIN),
        )
        spec = d["w_res"]
        w_res = sparse.coo_matrix(
            (np.array(spec["values"], dtype=np.float64),
             (np.array(spec["rows"], dtype=np.int32),
              np.array(spec["cols"], dtype=np.int32))),
            shape=tuple(spec["shape"]),
        ).tocsr()
        w_res.sort_indices()
        w_res.indices = w_res.indices.astype(np.int32, copy=False)
        w_res.indptr = w_res.indptr.astype(np.int32, copy=False)
        model.weights = ReservoirWeights(
            np.array(d["w_in"], dtype=np.float64),
            w_res,
            np.array(d["b"], dtype=np.float64),
            np.array(d["activation_ids"], dtype=np.int8),
            w_out=np.array(d["w_out"], dtype=np.float64),
            c=np.array(d["c"], dtype=np.float64),
        )
        model.input_scaler = AffineScaler.from_dict(d["input_scaler"])
        model.target_scaler = AffineScaler.from_dict(d["target_scaler"])
        model.channel_names = d.get("channel_names")
        model.train_score = d.get("train_score")
        model._washout_used = d["washout"]
        model._n_exog = d["n_exog"]
        model._n_outputs = d["n_outputs"]
        model._h_end = np.array(d["h_end"], dtype=np.float64)
        model._fb_seed = np.array(d["fb_seed"], dtype=np.float64)
        return model

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh)

    @classmethod
    def load(cls, path) -> "ReservoirModel":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    # -- helpers -------------------------------------------------------------

    def _require_fitted(self):
        if not self.is_fitted:
            raise RuntimeError("model is not fitted")

    @staticmethod
    def _as_2d(a) -> np.ndarray:
        a = np.asarray(a, dtype=np.float64)
        if a.ndim == 1:
            a = a[:, None]
        if a.ndim != 2:
            raise ValueError(f"expected 1-D or 2-D series, got shape {a.shape}")
        return a
