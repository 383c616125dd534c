#!/usr/bin/env python3
"""Benchmark the compiled state-update kernels against the NumPy fallback.

Times the two hot loops (training-state collection and the autonomous
feedback rollout) on workloads shaped like the pendulum studies, plus an
end-to-end fit+predict in each backend via a subprocess with
RESONANT_PURE_PYTHON toggled.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from resonant import _kernels_py, kernels
from resonant.reservoir import HyperParams, build_weights


def time_call(fn, *args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_states(n_nodes, n_steps, repeats):
    hps = HyperParams(n_nodes, 1.1, 0.4, 0.01, 0.5, 1.0)
    w = build_weights(hps, 3, seed=0)
    rng = np.random.default_rng(0)
    proj = rng.uniform(-1, 1, size=(n_steps, n_nodes))
    h0 = np.zeros(n_nodes)
    ids = w.activation_ids

    t_py = time_call(
        _kernels_py.reservoir_states, w.w_res, proj, h0, 0.01, ids, 1.0,
        repeats=repeats,
    )
    if not kernels.USING_COMPILED:
        return t_py, None
    data, indices, indptr = kernels._csr_parts(w.w_res)
    t_cy = time_call(
        kernels._kernels_cy.reservoir_states_csr,
        data, indices, indptr, proj, h0, 0.01, ids, 1.0,
        repeats=repeats,
    )
    return t_py, t_cy


def bench_rollout(n_nodes, n_steps, repeats):
    hps = HyperParams(n_nodes, 1.1, 0.4, 0.01, 0.5, 1.0)
    w = build_weights(hps, 3, seed=0)
    rng = np.random.default_rng(0)
    proj = rng.uniform(-1, 1, size=(n_steps, n_nodes))
    w_in_fb = rng.uniform(-1, 1, size=(n_nodes, 2))
    w_out = rng.normal(size=(2, n_nodes)) * 0.02
    c = np.zeros(2)
    h0 = np.zeros(n_nodes)
    fb0 = np.zeros(2)
    ids = w.activation_ids

    t_py = time_call(
        _kernels_py.feedback_rollout,
        w.w_res, proj, w_in_fb, h0, 0.01, ids, 1.0, w_out, c, False, fb0,
        repeats=repeats,
    )
    if not kernels.USING_COMPILED:
        return t_py, None
    data, indices, indptr = kernels._csr_parts(w.w_res)
    t_cy = time_call(
        kernels._kernels_cy.feedback_rollout_csr,
        data, indices, indptr, proj, w_in_fb, h0, 0.01, ids, 1.0,
        w_out, c, False, fb0,
        repeats=repeats,
    )
    return t_py, t_cy


END_TO_END = r"""
import time
import numpy as np
from resonant import kernels
from resonant.experiments import pure_prediction_config, run_forecast

start = time.perf_counter()
report = run_forecast(pure_prediction_config())
print(f"{kernels.backend_name()} end-to-end fit+predict: "
      f"{time.perf_counter() - start:.2f}s (test NMSE {report.test_nmse:.4f})")
"""


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    repeats = 2 if args.quick else 3
    shapes = [(100, 2000), (202, 12000)] if not args.quick else [(100, 2000)]

    print(f"active backend: {kernels.backend_name()}")
    print(f"{'workload':<34}{'numpy':>10}{'cython':>10}{'speedup':>9}")
    for n_nodes, n_steps in shapes:
        for name, bench in (("states", bench_states), ("rollout", bench_rollout)):
            t_py, t_cy = bench(n_nodes, n_steps, repeats)
            label = f"{name} N={n_nodes} K={n_steps}"
            if t_cy is None:
                print(f"{label:<34}{t_py:>9.3f}s{'-':>10}{'-':>9}")
            else:
                print(f"{label:<34}{t_py:>9.3f}s{t_cy:>9.3f}s{t_py / t_cy:>8.1f}x")

    if not args.quick:
        print()
        for pure in ("0", "1"):
            env = dict(os.environ, RESONANT_PURE_PYTHON=pure)
            subprocess.run([sys.executable, "-c", END_TO_END], env=env, check=True)


if __name__ == "__main__":
    main()
