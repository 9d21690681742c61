"""Classical random walk on the line, for comparison with the quantum walk."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .state import PositionDistribution

__all__ = ["ClassicalWalkSpec", "binomial_distribution", "classical_walk_mc", "classical_sigma"]


@dataclass(frozen=True)
class ClassicalWalkSpec:
    steps: int
    bias: float = 0.5  # probability of a +1 step

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not 0.0 <= self.bias <= 1.0:
            raise ValueError("bias must lie in [0, 1]")


def _sites(n: int) -> np.ndarray:
    # same window convention as the quantum engine, parity zeros included
    return np.arange(-n - 1, n + 2)


def binomial_distribution(spec: ClassicalWalkSpec) -> PositionDistribution:
    """P(xi) = C(N, (N+xi)/2) b^((N+xi)/2) (1-b)^((N-xi)/2) on sites of parity N."""
    n = spec.steps
    sites = _sites(n)
    probs = np.zeros(sites.size)
    xi = np.arange(-n, n + 1, 2)
    probs[xi + n + 1] = binom.pmf((n + xi) // 2, n, spec.bias)
    return PositionDistribution(sites, probs)


def classical_walk_mc(spec: ClassicalWalkSpec, trials: int, master_seed: int) -> PositionDistribution:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(master_seed)
    ups = rng.binomial(spec.steps, spec.bias, size=trials)
    xi = 2 * ups - spec.steps
    sites = _sites(spec.steps)
    counts = np.bincount(xi + spec.steps + 1, minlength=sites.size)
    return PositionDistribution.from_counts(sites, counts)


def classical_sigma(n: int, bias: float = 0.5) -> float:
    """Width 2 sqrt(N b (1-b)) of the N-step walk."""
    if n < 0:
        raise ValueError("N must be >= 0")
    return 2.0 * float(np.sqrt(n * bias * (1.0 - bias)))
