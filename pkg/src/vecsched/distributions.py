"""Finite discrete nonnegative random variables.

The stochastic pipeline only ever needs exact moment queries on finite
supports: means, truncated and exceptional parts at a threshold, effective
sizes (scaled log moment generating function values), and exact convolution
of independent variables. Continuous laws must be discretized by the caller
before entering this module.

Distributions are immutable; every operation returns a new value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import CapacityError

# Atom values closer than this are merged into one atom; probabilities are
# validated to sum to 1 at the same resolution.
VALUE_MERGE_TOL = 1e-12
PROB_SUM_TOL = 1e-12

DEFAULT_ATOM_BUDGET = 1 << 20


def _normalize_atoms(atoms) -> tuple[tuple[float, float], ...]:
    cleaned: list[tuple[float, float]] = []
    for value, prob in atoms:
        v, q = float(value), float(prob)
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"atom values must be finite and >= 0, got {v}")
        if not math.isfinite(q) or q < 0:
            raise ValueError(f"atom probabilities must be finite and >= 0, got {q}")
        if q > 0:
            cleaned.append((v, q))
    if not cleaned:
        raise ValueError("distribution needs at least one atom with positive probability")
    cleaned.sort()
    merged: list[list[float]] = [list(cleaned[0])]
    for v, q in cleaned[1:]:
        if v - merged[-1][0] <= VALUE_MERGE_TOL:
            merged[-1][1] += q
        else:
            merged.append([v, q])
    total = math.fsum(q for _, q in merged)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise ValueError(f"probabilities must sum to 1 within {PROB_SUM_TOL}, got {total!r}")
    return tuple((v, q) for v, q in merged)


@dataclass(frozen=True)
class DiscreteDistribution:
    """A nonnegative random variable with finitely many atoms.

    ``atoms`` is a tuple of (value, probability) pairs sorted by strictly
    increasing value. Zero-probability atoms are dropped and near-duplicate
    values merged at construction, so the invariants are strict.
    """

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", _normalize_atoms(self.atoms))

    # -- constructors ------------------------------------------------------

    @classmethod
    def point_mass(cls, value: float) -> "DiscreteDistribution":
        return cls(((value, 1.0),))

    @classmethod
    def bernoulli(cls, prob: float, value: float) -> "DiscreteDistribution":
        """Takes ``value`` with probability ``prob``, else 0."""
        if not (0 < prob <= 1):
            raise ValueError(f"prob must be in (0,1], got {prob}")
        if prob == 1.0:
            return cls.point_mass(value)
        return cls(((0.0, 1.0 - prob), (value, prob)))

    @classmethod
    def uniform(cls, values) -> "DiscreteDistribution":
        vals = list(values)
        q = 1.0 / len(vals)
        return cls(tuple((v, q) for v in vals))

    # -- basic queries -----------------------------------------------------

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.atoms)

    @property
    def probs(self) -> tuple[float, ...]:
        return tuple(q for _, q in self.atoms)

    def support_size(self) -> int:
        return len(self.atoms)

    def max_value(self) -> float:
        return self.atoms[-1][0]

    def mean(self) -> float:
        return math.fsum(v * q for v, q in self.atoms)

    def tail(self, threshold: float) -> float:
        """Exact probability of taking a value >= threshold."""
        return math.fsum(q for v, q in self.atoms if v >= threshold)

    # -- threshold decomposition -------------------------------------------

    def truncate(self, theta: float) -> "DiscreteDistribution":
        """Value kept when below ``theta``, replaced by 0 otherwise."""
        if theta <= 0:
            raise ValueError(f"theta must be > 0, got {theta}")
        moved = math.fsum(q for v, q in self.atoms if v >= theta)
        kept = [(v, q) for v, q in self.atoms if v < theta]
        if moved > 0:
            kept.append((0.0, moved))
        return DiscreteDistribution(tuple(kept))

    def exceptional(self, theta: float) -> "DiscreteDistribution":
        """Value kept when >= ``theta``, replaced by 0 otherwise."""
        if theta <= 0:
            raise ValueError(f"theta must be > 0, got {theta}")
        moved = math.fsum(q for v, q in self.atoms if v < theta)
        kept = [(v, q) for v, q in self.atoms if v >= theta]
        if moved > 0:
            kept.append((0.0, moved))
        return DiscreteDistribution(tuple(kept))

    def exceptional_mean(self, theta: float) -> float:
        """Mean contribution of values >= ``theta``, computed exactly."""
        if theta <= 0:
            raise ValueError(f"theta must be > 0, got {theta}")
        return math.fsum(v * q for v, q in self.atoms if v >= theta)

    # -- effective size ------------------------------------------------------

    def effective_size(self, lam: float) -> float:
        """log base lam of E[lam**V], the additive tail measure of V.

        For lam = 1 this is the mean. Evaluated in log space with a max
        shift so large supports or large bases cannot overflow. Values of
        lam in (1, 1.001) are accepted but numerically ill-conditioned;
        expect reduced precision there.
        """
        if lam < 1:
            raise ValueError(f"lam must be >= 1, got {lam}")
        if lam == 1.0:
            return self.mean()
        log_lam = math.log(lam)
        # log-sum-exp of v*log(lam) + log(q) over atoms
        shifted = [v * log_lam + math.log(q) for v, q in self.atoms]
        m = max(shifted)
        s = m + math.log(math.fsum(math.exp(a - m) for a in shifted))
        # E[lam**V] >= 1 for nonnegative V, so the result is never negative.
        return max(s / log_lam, 0.0)

    # -- rescaling -----------------------------------------------------------

    def scale(self, c: float) -> "DiscreteDistribution":
        """Multiply every atom value by ``c`` > 0."""
        if c <= 0:
            raise ValueError(f"scale factor must be > 0, got {c}")
        return DiscreteDistribution(tuple((v * c, q) for v, q in self.atoms))


def convolve(x: DiscreteDistribution, y: DiscreteDistribution,
             atom_budget: int = DEFAULT_ATOM_BUDGET) -> DiscreteDistribution:
    """Exact distribution of the sum of two independent variables.

    Raises CapacityError when the product of the support sizes exceeds
    ``atom_budget``; callers must then fall back to sampling.
    """
    k = x.support_size() * y.support_size()
    if k > atom_budget:
        raise CapacityError(f"convolution needs {k} atom pairs, budget is {atom_budget}")
    xv = np.array(x.values)
    yv = np.array(y.values)
    xq = np.array(x.probs)
    yq = np.array(y.probs)
    vals = (xv[:, None] + yv[None, :]).ravel()
    qs = (xq[:, None] * yq[None, :]).ravel()
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    qs = qs[order]
    # merge runs of near-identical values
    boundary = np.empty(vals.size, dtype=bool)
    boundary[0] = True
    boundary[1:] = np.diff(vals) > VALUE_MERGE_TOL
    starts = np.flatnonzero(boundary)
    merged_vals = vals[starts]
    merged_qs = np.add.reduceat(qs, starts)
    return DiscreteDistribution(tuple(zip(merged_vals.tolist(), merged_qs.tolist())))


def convolve_all(dists, atom_budget: int = DEFAULT_ATOM_BUDGET) -> DiscreteDistribution:
    """Exact distribution of a sum of independent variables (empty sum = 0)."""
    acc = DiscreteDistribution.point_mass(0.0)
    for d in dists:
        acc = convolve(acc, d, atom_budget=atom_budget)
    return acc
