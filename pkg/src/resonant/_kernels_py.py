"""NumPy implementations of the sequential state-update loops.

These are the pure-Python fallbacks for the compiled kernels in
``_kernels_cy``. Both backends receive the input projection
``W_in @ u_k + b`` precomputed as one BLAS call so their outputs agree to
floating-point roundoff; only the per-step recurrence differs.
"""

from __future__ import annotations

import numpy as np

from . import activations as act


def _activation_groups(act_ids: np.ndarray):
    """Unique activation codes with the node indices using each of them."""
    codes = np.unique(act_ids)
    if codes.shape[0] == 1:
        return [(int(codes[0]), slice(None))]
    return [(int(code), np.where(act_ids == code)[0]) for code in codes]


def _apply_inplace(groups, z, out, theta_star):
    for code, idx in groups:
        if code == act.TANH:
            out[idx] = np.tanh(z[idx])
        elif code == act.RELU:
            out[idx] = np.maximum(z[idx], 0.0)
        elif code == act.SIN:
            out[idx] = np.sin(z[idx])
        elif code == act.IDENTITY:
            out[idx] = z[idx]
        else:
            zi = z[idx]
            out[idx] = np.where(np.abs(zi) <= theta_star, zi, np.tanh(zi))


def reservoir_states(w_res, proj, h0, alpha, act_ids, theta_star):
    """Run the leaky state recurrence over K steps.

    w_res: N x N CSR adjacency. proj: K x N precomputed input projection
    (W_in @ u_k + b per row). Returns the K x N state trace.
    """
    n_steps, n_nodes = proj.shape
    states = np.empty((n_steps, n_nodes), dtype=np.float64)
    h = np.asarray(h0, dtype=np.float64).copy()
    groups = _activation_groups(act_ids)
    f = np.empty(n_nodes, dtype=np.float64)
    keep = 1.0 - alpha
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n_steps):
            z = w_res.dot(h)
            z += proj[k]
            _apply_inplace(groups, z, f, theta_star)
            h = keep * h + alpha * f
            states[k] = h
    return states


def feedback_rollout(
    w_res,
    proj_exog,
    w_in_fb,
    h0,
    alpha,
    act_ids,
    theta_star,
    w_out,
    c,
    out_tanh,
    fb0,
):
    """Autonomous rollout: each step's scaled prediction feeds the next input.

    proj_exog: K x N projection of the exogenous channels (W_in_exog @ u + b).
    w_in_fb: N x P input weights of the feedback channels. Returns the K x P
    scaled predictions and the final hidden state.
    """
    n_steps, n_nodes = proj_exog.shape
    n_out = w_out.shape[0]
    preds = np.empty((n_steps, n_out), dtype=np.float64)
    h = np.asarray(h0, dtype=np.float64).copy()
    fb = np.asarray(fb0, dtype=np.float64).copy()
    groups = _activation_groups(act_ids)
    f = np.empty(n_nodes, dtype=np.float64)
    keep = 1.0 - alpha
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n_steps):
            z = w_res.dot(h)
            z += proj_exog[k]
            z += w_in_fb.dot(fb)
            _apply_inplace(groups, z, f, theta_star)
            h = keep * h + alpha * f
            y = w_out.dot(h) + c
            if out_tanh:
                y = np.tanh(y)
            preds[k] = y
            fb = y
    return preds, h
