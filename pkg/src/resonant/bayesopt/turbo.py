"""Trust-region Bayesian optimization over the unit cube (minimization).

Several independent arms each keep a hyper-rectangle around their best
point. Per round every arm fits a GP surrogate to its own history, draws
scrambled-Sobol candidates inside the rectangle, picks a batch by Thompson
sampling, and grows or shrinks the rectangle by its success/failure
counters. Arms whose rectangle collapses restart from fresh quasi-random
samples. All evaluations in a round are independent; they may run on
worker processes and are merged back in (arm, candidate) order, so results
do not depend on the worker count.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import qmc

from ..errors import AllDiverged, DegenerateData
from .gp import GpSurrogate


@dataclass
class TurboConfig:
    """Trust-region constants; defaults follow the usual TuRBO convention."""

    length_init: float = 0.8
    length_min: float = 2.0**-7
    length_max: float = 1.6
    success_tolerance: int = 3
    failure_tolerance: int | None = None  # default: ceil(dim / batch_size)
    n_candidates: int | None = None  # default: min(100 * dim, 5000)
    log_scores: bool = True  # fit the GP to log(score + 1e-9)
    penalty_score: float = 1e6

    def resolved_failure_tolerance(self, dim: int, batch_size: int) -> int:
        if self.failure_tolerance is not None:
            return self.failure_tolerance
        return math.ceil(dim / batch_size)

    def resolved_n_candidates(self, dim: int) -> int:
        if self.n_candidates is not None:
            return self.n_candidates
        return min(100 * dim, 5000)


@dataclass
class TrustRegionState:
    """One arm: normalized center, edge length, and its evaluation history."""

    center: np.ndarray
    length: float
    success_count: int = 0
    failure_count: int = 0
    points: list = field(default_factory=list)
    scores: list = field(default_factory=list)
    best_score: float = math.inf

    def observe(self, point: np.ndarray, score: float) -> None:
        self.points.append(np.asarray(point, dtype=np.float64))
        self.scores.append(float(score))
        if score < self.best_score:
            self.best_score = float(score)
            self.center = np.asarray(point, dtype=np.float64).copy()


@dataclass
class TrialRecord:
    eval_index: int
    arm: int
    length: float
    point: np.ndarray
    score: float
    wall_ms: float


@dataclass
class TurboResult:
    best_point: np.ndarray
    best_score: float
    trials: list


def _sobol(dim: int, n: int, seed) -> np.ndarray:
    """n scrambled-Sobol points in [0,1)^dim (drawn from the next power of 2)."""
    sampler = qmc.Sobol(d=dim, scramble=True, seed=seed)
    m = max(1, math.ceil(math.log2(max(n, 2))))
    return sampler.random_base2(m)[:n]


def propose(tr: TrustRegionState, gp: GpSurrogate, n_candidates: int,
            batch_size: int, seed) -> np.ndarray:
    """Thompson-sampled batch from quasi-random candidates inside the region.

    Box sides are the region length rescaled by the GP's normalized
    lengthscales and clipped to the unit cube; a coordinate-perturbation
    mask keeps the expected number of perturbed coordinates at
    min(dim, 20 * min(1, length)); one joint posterior draw over the
    candidates selects the batch_size smallest values.
    """
    rng = np.random.default_rng(seed)
    dim = tr.center.shape[0]

    ell = gp.lengthscales
    weights = ell / ell.mean()
    weights = weights / np.prod(weights) ** (1.0 / dim)
    lower = np.clip(tr.center - weights * tr.length / 2.0, 0.0, 1.0)
    upper = np.clip(tr.center + weights * tr.length / 2.0, 0.0, 1.0)

    draws = _sobol(dim, n_candidates, rng)
    candidates = lower + draws * (upper - lower)

    prob = min(1.0, 20.0 * min(1.0, tr.length) / dim)
    mask = rng.random((n_candidates, dim)) < prob
    bare = ~mask.any(axis=1)
    mask[bare, rng.integers(0, dim, size=int(bare.sum()))] = True
    candidates = np.where(mask, candidates, tr.center)

    sample = gp.sample_joint(candidates, seed=int(rng.integers(2**31)))
    order = np.argsort(sample, kind="stable")[:batch_size]
    return candidates[order]


def update_region(tr: TrustRegionState, batch_scores, config: TurboConfig,
                  failure_tolerance: int) -> None:
    """Expand on enough consecutive successes, halve on enough failures.

    Improvement means the best score in the batch beats the arm's
    incumbent (checked before the batch was folded into the history).
    """
    if min(batch_scores) < tr.best_score:
        tr.success_count += 1
        tr.failure_count = 0
    else:
        tr.success_count = 0
        tr.failure_count += 1
    if tr.success_count >= config.success_tolerance:
        tr.length = min(2.0 * tr.length, config.length_max)
        tr.success_count = 0
        tr.failure_count = 0
    elif tr.failure_count >= failure_tolerance:
        tr.length = tr.length / 2.0
        tr.success_count = 0
        tr.failure_count = 0


class TurboOptimizer:
    """Budgeted multi-arm trust-region search over [0,1]^dim."""

    def __init__(self, dim: int, n_trust_regions: int, max_evals: int,
                 initial_samples: int, *, batch_size: int = 1, seed: int = 0,
                 config: TurboConfig | None = None, n_jobs: int = 1,
                 log_hook=None):
        if n_trust_regions < 1:
            raise ValueError("n_trust_regions must be >= 1")
        if initial_samples < 2:
            raise ValueError("initial_samples must be >= 2")
        if max_evals < n_trust_regions * initial_samples:
            raise ValueError(
                "max_evals must cover the initial samples: need at least "
                f"{n_trust_regions * initial_samples}, got {max_evals}"
            )
        self.dim = dim
        self.n_trust_regions = n_trust_regions
        self.max_evals = max_evals
        self.initial_samples = initial_samples
        self.batch_size = batch_size
        self.seed = seed
        self.config = config or TurboConfig()
        self.n_jobs = n_jobs
        self.log_hook = log_hook
        self.trials: list[TrialRecord] = []
        self._restart_counts = [0] * n_trust_regions

    # -- evaluation plumbing -------------------------------------------------

    def _evaluate(self, objective, jobs):
        """jobs: list of (arm, length, point). Returns per-job scores,
        recording trials in submission order."""
        points = [point for _, _, point in jobs]
        if self.n_jobs == 1 or len(points) == 1:
            timed = []
            for point in points:
                start = time.perf_counter()
                score = objective(point)
                timed.append((float(score), (time.perf_counter() - start) * 1e3))
        else:
            start = time.perf_counter()
            scores = Parallel(n_jobs=self.n_jobs)(
                delayed(objective)(point) for point in points
            )
            elapsed = (time.perf_counter() - start) * 1e3 / len(points)
            timed = [(float(s), elapsed) for s in scores]
        results = []
        for (arm, length, point), (score, wall_ms) in zip(jobs, timed):
            record = TrialRecord(
                eval_index=len(self.trials), arm=arm, length=length,
                point=np.asarray(point, dtype=np.float64), score=score,
                wall_ms=wall_ms,
            )
            self.trials.append(record)
            if self.log_hook is not None:
                self.log_hook(record)
            results.append(record)
        return results

    def _init_jobs(self, arm: int, length: float, budget: int):
        seed = np.random.SeedSequence(
            [self.seed, 1000 + arm, self._restart_counts[arm]]
        )
        count = min(self.initial_samples, budget)
        points = _sobol(self.dim, count, np.random.default_rng(seed))
        return [(arm, length, point) for point in points]

    # -- main loop -------------------------------------------------------------

    def minimize(self, objective, resume_trials=None) -> TurboResult:
        """Run arms until the evaluation budget is spent.

        objective maps a unit-cube point to a finite score (lower is
        better). resume_trials replays previously logged evaluations into
        the arms without spending budget on them.
        """
        cfg = self.config
        fail_tol = cfg.resolved_failure_tolerance(self.dim, self.batch_size)
        n_cand = cfg.resolved_n_candidates(self.dim)
        arms = [
            TrustRegionState(center=np.full(self.dim, 0.5), length=cfg.length_init)
            for _ in range(self.n_trust_regions)
        ]

        if resume_trials:
            for rec in resume_trials:
                record = TrialRecord(
                    eval_index=len(self.trials), arm=rec.arm, length=rec.length,
                    point=np.asarray(rec.point, dtype=np.float64),
                    score=float(rec.score), wall_ms=rec.wall_ms,
                )
                self.trials.append(record)
                if self.log_hook is not None:
                    self.log_hook(record)
                arms[rec.arm].observe(record.point, record.score)
            for arm_id, arm in enumerate(arms):
                arm_lengths = [r.length for r in self.trials if r.arm == arm_id]
                if arm_lengths:
                    arm.length = arm_lengths[-1]
        else:
            for arm_id, arm in enumerate(arms):
                budget = self.max_evals - len(self.trials)
                if budget <= 0:
                    break
                for rec in self._evaluate(
                    objective, self._init_jobs(arm_id, cfg.length_init, budget)
                ):
                    arm.observe(rec.point, rec.score)

        round_index = 0
        while len(self.trials) < self.max_evals:
            round_index += 1
            jobs = []
            proposers = []
            for arm_id, arm in enumerate(arms):
                if arm.length < cfg.length_min:
                    self._restart_counts[arm_id] += 1
                    arms[arm_id] = arm = TrustRegionState(
                        center=np.full(self.dim, 0.5), length=cfg.length_init
                    )
                    budget = self.max_evals - len(self.trials) - len(jobs)
                    if budget <= 0:
                        continue
                    init = self._init_jobs(arm_id, cfg.length_init, budget)
                    jobs.extend(init)
                    proposers.append((arm_id, len(jobs) - len(init), len(jobs), False))
                    continue
                gp_seed_seq = np.random.SeedSequence([self.seed, 3000 + arm_id, round_index])
                try:
                    gp = GpSurrogate.fit(
                        np.array(arm.points),
                        self._gp_scores(arm.scores),
                        seed=int(gp_seed_seq.generate_state(1)[0] % (2**31)),
                    )
                except DegenerateData:
                    continue
                prop_seed = np.random.SeedSequence([self.seed, 2000 + arm_id, round_index])
                batch = propose(arm, gp, n_cand, self.batch_size, prop_seed)
                start = len(jobs)
                jobs.extend((arm_id, arm.length, point) for point in batch)
                proposers.append((arm_id, start, len(jobs), True))

            if not jobs:
                break
            remaining = self.max_evals - len(self.trials)
            jobs = jobs[:remaining]
            records = self._evaluate(objective, jobs)
            for arm_id, start, stop, is_proposal in proposers:
                batch = records[start:min(stop, len(records))]
                if not batch:
                    continue
                arm = arms[arm_id]
                if is_proposal:
                    update_region(
                        arm, [r.score for r in batch], cfg, fail_tol
                    )
                for rec in batch:
                    arm.observe(rec.point, rec.score)

        if not self.trials:
            raise ValueError("no evaluations were run")
        best = min(self.trials, key=lambda r: (r.score, r.eval_index))
        if all(r.score >= cfg.penalty_score for r in self.trials):
            raise AllDiverged(
                "every objective evaluation hit the penalty score; "
                "the search bounds are likely bad"
            )
        return TurboResult(
            best_point=best.point.copy(), best_score=best.score, trials=self.trials
        )

    def _gp_scores(self, scores) -> np.ndarray:
        scores = np.asarray(scores, dtype=np.float64)
        if self.config.log_scores:
            return np.log(np.maximum(scores, 0.0) + 1e-9)
        return scores
