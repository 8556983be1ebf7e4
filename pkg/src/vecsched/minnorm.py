"""Reduction from stochastic min-norm load balancing to vector scheduling.

For each power-of-two index ell up to the machine count, a geometric-grid
search finds the threshold scale at which (a) the total exceptional mean of
the jobs fits in ell times the threshold and (b) the total effective size of
the rescaled truncated jobs fits in 8m. Those effective sizes, one dimension
per index, form a vector-scheduling instance whose lower bound is at most 8;
a single scheduler call on it yields an assignment that is simultaneously
good for every top-ell objective, with explicit per-index upper bounds and
optimum lower bounds emitted as a certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Assignment, VectorJob, VsInstance
from .distributions import DiscreteDistribution
from .scheduler import ScheduleResult, VsParams, vs_schedule


@dataclass(frozen=True)
class StochJob:
    """A stochastic job: an id and the distribution of its processing time."""

    id: str
    dist: DiscreteDistribution


@dataclass(frozen=True)
class StochInstance:
    """Independent stochastic jobs to be placed on m identical machines."""

    jobs: tuple[StochJob, ...]
    m: int

    def __post_init__(self) -> None:
        jobs = tuple(self.jobs)
        if self.m < 1:
            raise ValueError(f"machine count must be >= 1, got {self.m}")
        ids = [j.id for j in jobs]
        if len(set(ids)) != len(ids):
            raise ValueError("job ids must be unique")
        object.__setattr__(self, "jobs", jobs)

    @property
    def n(self) -> int:
        return len(self.jobs)

    def max_mean(self) -> float:
        """Largest job mean; 0 for empty or almost-surely-zero instances."""
        return max((j.dist.mean() for j in self.jobs), default=0.0)


@dataclass(frozen=True)
class ThresholdEntry:
    """Search output for one index: thresholds t > t_prime and the base lam.

    ``degenerate`` marks the defensive branch where the predicate already
    held at the bottom of the search interval; the optimum lower bound
    derived from t_prime is not claimed in that case.
    """

    ell: int
    t: float
    t_prime: float
    lam: int
    degenerate: bool = False


@dataclass(frozen=True)
class ThresholdProfile:
    """Per-index threshold entries (ascending ell) plus the grid ratio."""

    entries: tuple[ThresholdEntry, ...]
    epsilon: float

    def entry(self, ell: int) -> ThresholdEntry:
        for e in self.entries:
            if e.ell == ell:
                return e
        raise KeyError(f"no threshold entry for ell={ell}")

    def ells(self) -> tuple[int, ...]:
        return tuple(e.ell for e in self.entries)


@dataclass(frozen=True)
class CertificateRow:
    """Per-index certificate: lower bound on the optimum expected top-ell
    value, upper bound on the returned assignment's expected top-ell value,
    and their ratio."""

    ell: int
    opt_lower: float
    alg_upper: float
    ratio: float


@dataclass(frozen=True)
class MinNormCertificate:
    rows: tuple[CertificateRow, ...]
    alpha: float

    def row(self, ell: int) -> CertificateRow:
        for r in self.rows:
            if r.ell == ell:
                return r
        raise KeyError(f"no certificate row for ell={ell}")


@dataclass(frozen=True)
class MinNormSolution:
    assignment: Assignment
    profile: ThresholdProfile
    certificate: MinNormCertificate
    schedule: ScheduleResult


def pos_set(m: int) -> list[int]:
    """Powers of two up to m: [1, 2, 4, ..., 2**floor(log2 m)]."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    out = []
    ell = 1
    while ell <= m:
        out.append(ell)
        ell *= 2
    return out


def lam_for(m: int, ell: int) -> int:
    """Effective-size base used for index ell on m machines: floor(2m/ell)."""
    return (2 * m) // ell


def reduced_size(dist: DiscreteDistribution, theta: float, lam: int) -> float:
    """Effective size of the truncated job rescaled by 1/(4 theta).

    This is the scalar standing in for the job in the reduction instance; it
    is strictly below 1/4 because the truncated variable is below theta.
    """
    return dist.truncate(theta).scale(1.0 / (4.0 * theta)).effective_size(lam)


def threshold_predicate(inst: StochInstance, ell: int, theta: float) -> bool:
    """True iff both per-index budget inequalities hold at scale ``theta``:
    total exceptional mean at most ell * theta, and total reduced effective
    size at most 8m.
    """
    if theta <= 0:
        raise ValueError(f"theta must be > 0, got {theta}")
    exceptional_total = math.fsum(j.dist.exceptional_mean(theta) for j in inst.jobs)
    if exceptional_total > ell * theta:
        return False
    lam = lam_for(inst.m, ell)
    effective_total = math.fsum(reduced_size(j.dist, theta, lam) for j in inst.jobs)
    return effective_total <= 8.0 * inst.m


def threshold_search(inst: StochInstance, ell: int, epsilon: float = 1e-3) -> ThresholdEntry:
    """Find adjacent grid points t_prime < t <= (1+epsilon) * t_prime with the
    predicate false at t_prime and true at t.

    The grid is geometric with ratio 1+epsilon over [kappa/(m+2), 2n*kappa]
    where kappa is the largest job mean. The predicate always fails at the
    interval's bottom and holds at its top, so bisection over grid indices
    finds a sign change regardless of monotonicity in between.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    kappa = inst.max_mean()
    if kappa <= 0:
        raise ValueError("threshold search needs a job with positive mean")
    lam = lam_for(inst.m, ell)
    low = kappa / (inst.m + 2)
    hi = 2.0 * inst.n * kappa

    grid = [low]
    while grid[-1] < hi:
        grid.append(grid[-1] * (1.0 + epsilon))

    if threshold_predicate(inst, ell, grid[0]):
        # Cannot happen with exact arithmetic (the largest-mean job alone
        # pushes the exceptional total past ell * theta at the bottom), but
        # guard against float pathologies rather than mis-certify.
        return ThresholdEntry(ell, grid[0], grid[0] / (1.0 + epsilon), lam, degenerate=True)
    if not threshold_predicate(inst, ell, grid[-1]):
        raise RuntimeError("predicate unexpectedly false at the top of the search interval")

    lo_k, hi_k = 0, len(grid) - 1
    while hi_k - lo_k > 1:
        mid = (lo_k + hi_k) // 2
        if threshold_predicate(inst, ell, grid[mid]):
            hi_k = mid
        else:
            lo_k = mid
    return ThresholdEntry(ell, grid[hi_k], grid[lo_k], lam)


def build_threshold_profile(inst: StochInstance, epsilon: float = 1e-3) -> ThresholdProfile:
    entries = tuple(threshold_search(inst, ell, epsilon) for ell in pos_set(inst.m))
    return ThresholdProfile(entries, epsilon)


def build_reduction_instance(inst: StochInstance, profile: ThresholdProfile) -> VsInstance:
    """The vector-scheduling instance with one dimension per index.

    Job j's coordinate for index ell is the effective size of its truncated,
    rescaled distribution at that index's threshold. Entries are below 1/4
    and column totals at most 8m, so the instance's lower bound is at most 8.
    """
    jobs = []
    for j in inst.jobs:
        p = tuple(reduced_size(j.dist, e.t, e.lam) for e in profile.entries)
        jobs.append(VectorJob(j.id, p))
    return VsInstance(jobs=tuple(jobs), m=inst.m, d=len(profile.entries))


def solve_min_norm(inst: StochInstance, epsilon: float = 1e-3,
                   rng: np.random.Generator | None = None,
                   params: VsParams | None = None) -> MinNormSolution:
    """Threshold searches, one scheduler call, and the certificate.

    The assignment of the reduction instance is returned as the assignment of
    the stochastic jobs. alpha is max(1, reduction makespan); per index ell
    the certificate reports opt_lower = ell * t_prime / 2 and
    alg_upper = 2*ell*t + 8*(alpha+3)*ell*t. A degenerate threshold entry
    keeps the arithmetic but withdraws the optimality claim of opt_lower.

    Exactly one scheduler invocation happens per call; its failure, if any,
    propagates unchanged so the caller can retry.
    """
    all_on_first = Assignment({j.id: 1 for j in inst.jobs})
    if inst.max_mean() <= 0:
        # Almost-surely-zero jobs: any assignment is optimal for every norm.
        profile = ThresholdProfile(entries=(), epsilon=epsilon)
        cert = MinNormCertificate(rows=(), alpha=1.0)
        schedule = ScheduleResult(all_on_first, 0.0, True, 0, 0)
        return MinNormSolution(all_on_first, profile, cert, schedule)

    profile = build_threshold_profile(inst, epsilon)
    reduction = build_reduction_instance(inst, profile)
    schedule = vs_schedule(reduction, params=params, rng=rng)
    alpha = max(1.0, schedule.makespan)

    rows = []
    for e in profile.entries:
        opt_lower = e.ell * e.t_prime / 2.0
        alg_upper = 2.0 * e.ell * e.t + 8.0 * (alpha + 3.0) * e.ell * e.t
        ratio = alg_upper / opt_lower if opt_lower > 0 else math.inf
        rows.append(CertificateRow(e.ell, opt_lower, alg_upper, ratio))
    cert = MinNormCertificate(tuple(rows), alpha)
    return MinNormSolution(schedule.assignment, profile, cert, schedule)
