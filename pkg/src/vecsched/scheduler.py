"""Randomized lower-bound-relative vector scheduling.

The solver normalizes the instance so the natural lower bound equals 1 and
then repeatedly samples a random job subset to dedicate to a fresh machine.
A sampled subset is committed only if, in every dimension, it is small enough
to fit on one machine and what remains is small enough for the remaining
machines; if a bounded number of candidate draws all fail the check, the
attempt aborts with ScheduleFailure (a detectable event, so callers retry).

On success every machine-dimension load is at most
``threshold_factor * L * LB`` where ``L = max(ln d, U, 1)`` and U is an
optional caller-supplied bound with ``sum_j p[j][r] <= m * U * LB``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Assignment, VsInstance, compute_lb, makespan
from .exceptions import ScheduleFailure

CERT_TOL = 1e-9


@dataclass(frozen=True)
class VsParams:
    """Tuning constants of the randomized scheduler.

    q_numerator: a subset includes each job with probability
        q_numerator / machines_left.
    threshold_factor: a committed subset may load its machine up to
        threshold_factor * L in each dimension.
    load_bound: optional U with sum_j p[j][r] <= m * U * LB for all r;
        enters the scale L = max(ln d, load_bound, 1).
    """

    q_numerator: float = 7.0
    threshold_factor: float = 14.0
    load_bound: float = 1.0

    def __post_init__(self) -> None:
        if self.q_numerator <= 0:
            raise ValueError("q_numerator must be positive")
        if self.threshold_factor < 2 * self.q_numerator:
            raise ValueError("threshold_factor must be at least 2 * q_numerator")
        if self.load_bound <= 0:
            raise ValueError("load_bound must be positive")

    def trial_budget(self, original_m: int) -> int:
        """Candidate subsets drawn per iteration: ceil(log2(3 * original_m))."""
        return max(1, (3 * original_m - 1).bit_length())

    def scale_bound(self, d: int) -> float:
        """The scale L = max(ln d, load_bound, 1) entering all thresholds."""
        return max(math.log(d), self.load_bound, 1.0)


@dataclass(frozen=True)
class ScheduleResult:
    """Outcome of one successful solver attempt.

    ``certified`` records the detectable success event: the makespan is within
    threshold_factor * L * LB of the instance's lower bound. ``iterations``
    counts committed sampling rounds and ``resamples`` counts candidate
    subsets that were drawn but rejected.
    """

    assignment: Assignment
    makespan: float
    certified: bool
    iterations: int
    resamples: int


def sample_subset(job_ids, q: float, rng: np.random.Generator) -> list:
    """Independently include each job with probability ``q``.

    Reproducible for a given generator state; q = 1 returns every job.
    """
    if not (0 < q <= 1):
        raise ValueError(f"q must be in (0, 1], got {q}")
    ids = list(job_ids)
    mask = rng.random(len(ids)) < q
    return [job_id for job_id, keep in zip(ids, mask) if keep]


def _subset_ok(subset_totals: np.ndarray, residual_totals: np.ndarray,
               scale: float, machines_left: int, threshold_factor: float) -> bool:
    return bool((subset_totals <= threshold_factor * scale).all()
                and (residual_totals <= (machines_left - 1) * scale).all())


def is_good_subset(inst: VsInstance, subset, scale: float, machines_left: int,
                   threshold_factor: float = 14.0) -> bool:
    """Check the two per-dimension caps a committable subset must satisfy.

    In every dimension the subset total must be at most
    threshold_factor * scale and the total of the remaining jobs at most
    (machines_left - 1) * scale. Sizes are taken as-is, so callers working
    with a normalized instance must pass normalized thresholds.
    """
    if machines_left < 2:
        raise ValueError("machines_left must be >= 2")
    chosen = set(subset)
    unknown = chosen - set(inst.job_ids())
    if unknown:
        raise ValueError(f"subset contains unknown job ids: {sorted(unknown)[:3]}")
    in_mask = np.array([j.id in chosen for j in inst.jobs], dtype=bool)
    subset_totals = inst.size_matrix[in_mask].sum(axis=0)
    residual_totals = inst.size_matrix[~in_mask].sum(axis=0)
    return _subset_ok(subset_totals, residual_totals, scale, machines_left, threshold_factor)


def list_schedule(inst: VsInstance) -> Assignment:
    """Greedy baseline: place each job, in input order, on the machine whose
    updated load profile has the smallest maximum entry (lowest index wins
    ties). For one-dimensional instances the makespan is at most twice the
    lower bound.
    """
    loads = np.zeros((inst.m, inst.d))
    mapping: dict[str, int] = {}
    for j, job in enumerate(inst.jobs):
        scores = (loads + inst.size_matrix[j]).max(axis=1)
        i = int(np.argmin(scores))
        loads[i] += inst.size_matrix[j]
        mapping[job.id] = i + 1
    return Assignment(mapping)


def vs_schedule(inst: VsInstance, params: VsParams | None = None,
                rng: np.random.Generator | None = None) -> ScheduleResult:
    """Solve a vector-scheduling instance relative to its lower bound.

    After normalizing sizes so the lower bound is 1: one-dimensional
    instances go to the greedy baseline, instances with at most 6 machines
    put everything on machine 1 (makespan <= 6 * LB), and larger instances
    run the sampling loop, dedicating one machine per committed subset and
    dumping the residue on a single machine once only 6 machines remain.

    Raises ScheduleFailure if some iteration rejects all of its candidate
    subsets. Identical instance, params, and generator state reproduce the
    identical result.
    """
    vs_schedule.invocations += 1
    params = params if params is not None else VsParams()
    rng = rng if rng is not None else np.random.default_rng()

    n, m = inst.n, inst.m
    all_on_first = Assignment({j.id: 1 for j in inst.jobs})
    if n == 0:
        return ScheduleResult(all_on_first, 0.0, True, 0, 0)
    lb = compute_lb(inst)
    if lb == 0.0:
        # every size is zero; any assignment is optimal
        return ScheduleResult(all_on_first, 0.0, True, 0, 0)

    scale = params.scale_bound(inst.d)
    bound = params.threshold_factor * scale * lb + CERT_TOL

    if inst.d == 1:
        a = list_schedule(inst)
        ms = makespan(inst, a)
        return ScheduleResult(a, ms, ms <= bound, 0, 0)

    if m <= 6:
        ms = makespan(inst, all_on_first)
        return ScheduleResult(all_on_first, ms, ms <= bound, 0, 0)

    sizes = inst.size_matrix / lb
    trials = params.trial_budget(m)
    ids = inst.job_ids()

    remaining = np.arange(n)
    residual_totals = sizes.sum(axis=0)
    mapping: dict[str, int] = {}
    machines_left = m
    next_machine = 1
    iterations = 0
    resamples = 0

    while machines_left >= 7 and remaining.size:
        iterations += 1
        q = params.q_numerator / machines_left
        pool = sizes[remaining]
        committed = None
        for _ in range(trials):
            mask = rng.random(remaining.size) < q
            subset_totals = pool[mask].sum(axis=0)
            if _subset_ok(subset_totals, residual_totals - subset_totals,
                          scale, machines_left, params.threshold_factor):
                committed = mask
                break
            resamples += 1
        if committed is None:
            raise ScheduleFailure(
                f"no good subset among {trials} candidates with {machines_left} machines left")
        for idx in remaining[committed]:
            mapping[ids[idx]] = next_machine
        residual_totals = residual_totals - pool[committed].sum(axis=0)
        remaining = remaining[~committed]
        next_machine += 1
        machines_left -= 1

    for idx in remaining:
        mapping[ids[idx]] = next_machine

    a = Assignment(mapping)
    ms = makespan(inst, a)
    return ScheduleResult(a, ms, ms <= bound, iterations, resamples)


vs_schedule.invocations = 0
