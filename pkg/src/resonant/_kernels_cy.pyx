# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled state-update loops (CSR adjacency, per-node activations).

Mirrors _kernels_py exactly; see that module for the contract.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sin, tanh

cnp.import_array()


cdef inline double _act(signed char code, double z, double theta) noexcept nogil:
    if code == 0:    # tanh
        return tanh(z)
    elif code == 1:  # relu
        return z if z > 0.0 else 0.0
    elif code == 2:  # sin
        return sin(z)
    elif code == 3:  # identity
        return z
    else:            # hybrid relu/tanh
        return z if fabs(z) <= theta else tanh(z)


def reservoir_states_csr(
    const double[::1] data,
    const int[::1] indices,
    const int[::1] indptr,
    const double[:, ::1] proj,
    const double[::1] h0,
    double alpha,
    const signed char[::1] act_ids,
    double theta_star,
):
    cdef Py_ssize_t n_steps = proj.shape[0]
    cdef Py_ssize_t n = proj.shape[1]
    states_arr = np.empty((n_steps, n), dtype=np.float64)
    h_arr = np.array(h0, dtype=np.float64, copy=True)
    cdef double[:, ::1] states = states_arr
    cdef double[::1] h = h_arr
    cdef double keep = 1.0 - alpha
    cdef Py_ssize_t k, i, j
    cdef double z
    with nogil:
        for k in range(n_steps):
            for i in range(n):
                z = proj[k, i]
                for j in range(indptr[i], indptr[i + 1]):
                    z += data[j] * h[indices[j]]
                states[k, i] = _act(act_ids[i], z, theta_star)
            for i in range(n):
                h[i] = keep * h[i] + alpha * states[k, i]
                states[k, i] = h[i]
    return states_arr


def feedback_rollout_csr(
    const double[::1] data,
    const int[::1] indices,
    const int[::1] indptr,
    const double[:, ::1] proj_exog,
    const double[:, ::1] w_in_fb,
    const double[::1] h0,
    double alpha,
    const signed char[::1] act_ids,
    double theta_star,
    const double[:, ::1] w_out,
    const double[::1] c,
    bint out_tanh,
    const double[::1] fb0,
):
    cdef Py_ssize_t n_steps = proj_exog.shape[0]
    cdef Py_ssize_t n = proj_exog.shape[1]
    cdef Py_ssize_t p = w_out.shape[0]
    preds_arr = np.empty((n_steps, p), dtype=np.float64)
    h_arr = np.array(h0, dtype=np.float64, copy=True)
    fb_arr = np.array(fb0, dtype=np.float64, copy=True)
    fnew_arr = np.empty(n, dtype=np.float64)
    cdef double[:, ::1] preds = preds_arr
    cdef double[::1] h = h_arr
    cdef double[::1] fb = fb_arr
    cdef double[::1] fnew = fnew_arr
    cdef double keep = 1.0 - alpha
    cdef Py_ssize_t k, i, j, q
    cdef double z, y
    with nogil:
        for k in range(n_steps):
            for i in range(n):
                z = proj_exog[k, i]
                for j in range(indptr[i], indptr[i + 1]):
                    z += data[j] * h[indices[j]]
                for q in range(p):
                    z += w_in_fb[i, q] * fb[q]
                fnew[i] = _act(act_ids[i], z, theta_star)
            for i in range(n):
                h[i] = keep * h[i] + alpha * fnew[i]
            for q in range(p):
                y = c[q]
                for i in range(n):
                    y += w_out[q, i] * h[i]
                if out_tanh:
                    y = tanh(y)
                preds[k, q] = y
                fb[q] = y
    return preds_arr, h_arr
