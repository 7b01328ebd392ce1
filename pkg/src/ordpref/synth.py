"""Synthetic decision makers: random interaction families and tier functions.

A ground-truth model keeps all n singletons plus a controlled number of
randomly grown larger subsets, with independent Gaussian weights.  The
tier function splits the utility range over all 2**n alternatives into
equal intervals and grades each alternative by the first threshold its
score does not exceed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ordpref.core import (
    Alternative,
    AttributeSubset,
    AttributeUniverse,
    SubsetFamily,
    UtilityMap,
    evaluate,
)

_DEDUP_RETRIES = 1000


@dataclass(frozen=True)
class GeneratorConfig:
    n: int
    alpha: float
    p: float
    sigma: float = 100.0
    tiers: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if not 1 <= self.n <= 24:
            raise ValueError(f"attribute count out of range: {self.n}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"interaction share must be in [0, 1], got {self.alpha}")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"stop probability must be in (0, 1], got {self.p}")
        if self.sigma <= 0:
            raise ValueError("weight spread must be positive")
        if self.tiers < 1:
            raise ValueError("need at least one tier")


def grow_subset(n: int, p: float, rng: np.random.Generator) -> AttributeSubset:
    """Grow one random subset: start from a uniform singleton, then repeatedly
    add a uniform missing attribute, stopping with probability p after each
    addition (or when full).  Sizes are therefore at least 2 for n >= 2.
    """
    bits = 1 << int(rng.integers(n))
    full = (1 << n) - 1
    while bits != full:
        missing = [i for i in range(n) if not bits >> i & 1]
        bits |= 1 << missing[int(rng.integers(len(missing)))]
        if bits == full or rng.random() < p:
            break
    return AttributeSubset(bits, n)


def expected_subset_size(p: float, n: int) -> float:
    """Mean grown-subset size: 2 + (1 - p - (1-p)**(n-1)) / p."""
    return 2.0 + (1.0 - p - (1.0 - p) ** (n - 1)) / p


def sample_theta(config: GeneratorConfig, rng: np.random.Generator) -> SubsetFamily:
    """All singletons plus floor(alpha * (2**n - n)) distinct grown subsets.

    Growth retries on duplicates; if a fresh subset cannot be found within
    the retry cap (only possible when alpha saturates the universe) the
    family simply stops growing.
    """
    members = list(SubsetFamily.singletons(config.n).members)
    target = int(np.floor(config.alpha * ((1 << config.n) - config.n)))
    have = {s.bits for s in members}
    for _ in range(target):
        for _ in range(_DEDUP_RETRIES):
            candidate = grow_subset(config.n, config.p, rng)
            if candidate.bits not in have:
                have.add(candidate.bits)
                members.append(candidate)
                break
        else:
            break
    return SubsetFamily.of(members)


def sample_utilities(
    theta: SubsetFamily, sigma: float, rng: np.random.Generator
) -> UtilityMap:
    """Independent centered Gaussian weight (std dev sigma) per member."""
    return UtilityMap(theta, tuple(rng.normal(0.0, sigma, size=len(theta))))


@dataclass(frozen=True)
class TierFunction:
    """Grades alternatives into tiers 1..t by equal utility intervals.

    ``thresholds[k-1]`` is the upper edge of tier k; the last edge equals
    the maximum utility, so the best alternative lands in the top tier.
    A constant utility puts everything in tier 1.
    """

    theta: SubsetFamily
    utilities: UtilityMap
    thresholds: tuple[float, ...]
    low: float
    high: float

    @property
    def tiers(self) -> int:
        return len(self.thresholds)

    def score(self, alternative: Alternative) -> float:
        return evaluate(self.theta, self.utilities, alternative)

    def assign(self, alternative: Alternative) -> int:
        value = self.score(alternative)
        for k, edge in enumerate(self.thresholds, start=1):
            if value <= edge:
                return k
        return self.tiers  # guards against round-off at the very top


def build_tier_function(
    theta: SubsetFamily, utilities: UtilityMap, tiers: int
) -> TierFunction:
    """Scan all alternatives for the utility range and cut it into equal tiers."""
    if len(theta) == 0:
        raise ValueError("need a nonempty family to locate the attribute universe")
    n = theta.members[0].n
    universe = AttributeUniverse(n)
    values = [evaluate(theta, utilities, alt) for alt in universe.alternatives()]
    low, high = min(values), max(values)
    width = (high - low) / tiers
    edges = tuple(
        high if k == tiers else low + k * width for k in range(1, tiers + 1)
    )
    return TierFunction(theta, utilities, edges, low, high)
