"""Deterministic data model for vector scheduling.

Jobs carry a nonnegative size vector with one entry per dimension; an
assignment maps every job to one of ``m`` identical machines. The module
provides the induced per-machine per-dimension loads, the makespan, the
natural lower bound on the optimal makespan, and top-k / ordered-weighted
norm evaluation on load vectors.

All types are immutable after construction and all operations are pure, so
everything here is safe to use from concurrent callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

# Absolute tolerance used wherever an exact inequality is asserted on floats.
EXACT_TOL = 1e-9


def _as_readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class VectorJob:
    """A job with a nonnegative size per dimension."""

    id: str
    p: tuple[float, ...]

    def __post_init__(self) -> None:
        p = tuple(float(v) for v in self.p)
        if len(p) == 0:
            raise ValueError(f"job {self.id!r}: size vector must be non-empty")
        for v in p:
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"job {self.id!r}: sizes must be finite and >= 0, got {v}")
        object.__setattr__(self, "p", p)


@dataclass(frozen=True)
class VsInstance:
    """A vector-scheduling instance: jobs, machine count, dimension count."""

    jobs: tuple[VectorJob, ...]
    m: int
    d: int
    # n x d matrix of job sizes, built once at construction (read-only).
    size_matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        jobs = tuple(self.jobs)
        if self.m < 1:
            raise ValueError(f"machine count must be >= 1, got {self.m}")
        if self.d < 1:
            raise ValueError(f"dimension count must be >= 1, got {self.d}")
        ids = [j.id for j in jobs]
        if len(set(ids)) != len(ids):
            raise ValueError("job ids must be unique")
        for j in jobs:
            if len(j.p) != self.d:
                raise ValueError(f"job {j.id!r} has {len(j.p)} coordinates, expected d={self.d}")
        object.__setattr__(self, "jobs", jobs)
        mat = np.array([j.p for j in jobs], dtype=np.float64).reshape(len(jobs), self.d)
        object.__setattr__(self, "size_matrix", _as_readonly(mat))

    @property
    def n(self) -> int:
        return len(self.jobs)

    def job_ids(self) -> tuple[str, ...]:
        return tuple(j.id for j in self.jobs)


@dataclass(frozen=True)
class Assignment:
    """A total map from job id to machine index in [1..m]."""

    mapping: Mapping[str, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "mapping", dict(self.mapping))

    def machine_of(self, job_id: str) -> int:
        return self.mapping[job_id]

    def validate(self, inst: VsInstance) -> None:
        """Raise ValueError unless this assignment is total over inst's jobs."""
        ids = set(inst.job_ids())
        got = set(self.mapping)
        if got != ids:
            missing = sorted(ids - got)[:3]
            extra = sorted(got - ids)[:3]
            raise ValueError(f"assignment is not total: missing={missing} extra={extra}")
        for job_id, machine in self.mapping.items():
            if not (1 <= machine <= inst.m):
                raise ValueError(f"job {job_id!r} assigned to machine {machine}, valid range is 1..{inst.m}")


@dataclass(frozen=True)
class LoadMatrix:
    """Per-machine per-dimension loads induced by an assignment."""

    loads: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "loads", _as_readonly(self.loads))

    def max_entry(self) -> float:
        return float(self.loads.max()) if self.loads.size else 0.0


@dataclass(frozen=True)
class OrderedNorm:
    """Ordered-weighted norm: nonincreasing nonnegative weights dotted with
    the coordinates of its argument sorted in nonincreasing order.

    The top-k norms are the special case of k ones followed by zeros; general
    weight vectors are the test surrogate for monotone symmetric norms.
    """

    w: tuple[float, ...]

    def __post_init__(self) -> None:
        w = tuple(float(v) for v in self.w)
        if not w:
            raise ValueError("weight vector must be non-empty")
        if w[0] <= 0:
            raise ValueError("leading weight must be positive")
        for a, b in zip(w, w[1:]):
            if b < 0 or b > a:
                raise ValueError("weights must be nonincreasing and nonnegative")
        object.__setattr__(self, "w", w)

    @classmethod
    def top(cls, ell: int, m: int) -> "OrderedNorm":
        """Weights of the top-ell norm on m coordinates."""
        if not (1 <= ell <= m):
            raise ValueError(f"ell must be in 1..{m}, got {ell}")
        return cls((1.0,) * ell + (0.0,) * (m - ell))


def compute_lb(inst: VsInstance) -> float:
    """Natural lower bound on the optimal makespan.

    The maximum of (a) the largest single job coordinate, since every job must
    be placed somewhere, and (b) the largest per-dimension average load, since
    each dimension's total is spread over m machines. Empty instances have
    lower bound 0.
    """
    if inst.n == 0:
        return 0.0
    mat = inst.size_matrix
    return float(max(mat.max(), mat.sum(axis=0).max() / inst.m))


def load_matrix(inst: VsInstance, a: Assignment) -> LoadMatrix:
    """Per-machine per-dimension loads of assignment ``a`` on ``inst``."""
    a.validate(inst)
    loads = np.zeros((inst.m, inst.d))
    for j, job in enumerate(inst.jobs):
        loads[a.mapping[job.id] - 1] += inst.size_matrix[j]
    return LoadMatrix(loads)


def makespan(inst: VsInstance, a: Assignment) -> float:
    """Maximum load over all machine-dimension pairs under assignment ``a``."""
    return load_matrix(inst, a).max_entry()


def top_ell(x: Sequence[float] | np.ndarray, ell: int) -> float:
    """Sum of the ``ell`` largest entries of the nonnegative vector ``x``."""
    xs = np.asarray(x, dtype=np.float64)
    if not (1 <= ell <= xs.size):
        raise ValueError(f"ell must be in 1..{xs.size}, got {ell}")
    if (xs < 0).any():
        raise ValueError("top_ell requires entrywise nonnegative input")
    return float(np.sort(xs)[xs.size - ell:].sum())


def ordered_norm_eval(f: OrderedNorm, x: Sequence[float] | np.ndarray) -> float:
    """Evaluate the ordered-weighted norm ``f`` at the nonnegative vector ``x``."""
    xs = np.asarray(x, dtype=np.float64)
    if xs.size != len(f.w):
        raise ValueError(f"length mismatch: norm has {len(f.w)} weights, vector has {xs.size} entries")
    if (xs < 0).any():
        raise ValueError("ordered_norm_eval requires entrywise nonnegative input")
    return float(np.dot(np.sort(xs)[::-1], f.w))


def make_instance(sizes: Iterable[Sequence[float]], m: int, id_prefix: str = "j") -> VsInstance:
    """Build an instance from raw size vectors, assigning ids j0, j1, ..."""
    jobs = tuple(VectorJob(f"{id_prefix}{i}", tuple(p)) for i, p in enumerate(sizes))
    d = len(jobs[0].p) if jobs else 1
    return VsInstance(jobs=jobs, m=m, d=d)
