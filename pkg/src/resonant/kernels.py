"""Backend selection for the sequential state-update kernels.

Importing this module picks the compiled Cython kernels when the extension
built, otherwise the NumPy fallback. Set ``RESONANT_PURE_PYTHON=1`` to force
the fallback (used by the equivalence tests and the benchmark).
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

if os.environ.get("RESONANT_PURE_PYTHON", "").strip() in ("", "0"):
    try:
        from . import _kernels_cy
    except ImportError:
        _kernels_cy = None
else:
    _kernels_cy = None

USING_COMPILED = _kernels_cy is not None


def backend_name() -> str:
    return "cython" if USING_COMPILED else "numpy"


def _csr_parts(w_res):
    data = np.ascontiguousarray(w_res.data, dtype=np.float64)
    indices = np.ascontiguousarray(w_res.indices, dtype=np.int32)
    indptr = np.ascontiguousarray(w_res.indptr, dtype=np.int32)
    return data, indices, indptr


def reservoir_states(w_res, proj, h0, alpha, act_ids, theta_star):
    """K-step leaky recurrence; see _kernels_py.reservoir_states."""
    proj = np.ascontiguousarray(proj, dtype=np.float64)
    h0 = np.ascontiguousarray(h0, dtype=np.float64)
    act_ids = np.ascontiguousarray(act_ids, dtype=np.int8)
    if USING_COMPILED:
        data, indices, indptr = _csr_parts(w_res)
        return _kernels_cy.reservoir_states_csr(
            data, indices, indptr, proj, h0, float(alpha), act_ids, float(theta_star)
        )
    return _kernels_py.reservoir_states(w_res, proj, h0, float(alpha), act_ids, float(theta_star))


def feedback_rollout(
    w_res, proj_exog, w_in_fb, h0, alpha, act_ids, theta_star, w_out, c, out_tanh, fb0
):
    """Autonomous prediction loop; see _kernels_py.feedback_rollout."""
    proj_exog = np.ascontiguousarray(proj_exog, dtype=np.float64)
    w_in_fb = np.ascontiguousarray(w_in_fb, dtype=np.float64)
    h0 = np.ascontiguousarray(h0, dtype=np.float64)
    act_ids = np.ascontiguousarray(act_ids, dtype=np.int8)
    w_out = np.ascontiguousarray(w_out, dtype=np.float64)
    c = np.ascontiguousarray(c, dtype=np.float64)
    fb0 = np.ascontiguousarray(fb0, dtype=np.float64)
    if USING_COMPILED:
        data, indices, indptr = _csr_parts(w_res)
        return _kernels_cy.feedback_rollout_csr(
            data,
            indices,
            indptr,
            proj_exog,
            w_in_fb,
            h0,
            float(alpha),
            act_ids,
            float(theta_star),
            w_out,
            c,
            bool(out_tanh),
            fb0,
        )
    return _kernels_py.feedback_rollout(
        w_res,
        proj_exog,
        w_in_fb,
        h0,
        float(alpha),
        act_ids,
        float(theta_star),
        w_out,
        c,
        bool(out_tanh),
        fb0,
    )
