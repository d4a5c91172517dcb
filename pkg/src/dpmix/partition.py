"""Globally optimal K-block partitions of sorted data by dynamic programming."""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .errors import InfeasibleError
from .model import BlockPartition, WeightedSample
from .scoring import PrefixAccumulator, ScoringSpec, score_matrix

BRUTE_FORCE_MAX_N = 20


def _check_k(N, K, spec):
    if K < 1:
        raise InfeasibleError("K must be at least 1")
    if K > N:
        raise InfeasibleError(f"K={K} exceeds the number of points N={N}")
    if spec.needs_range and K > N // 2:
        raise InfeasibleError(
            f"K={K} exceeds N//2={N // 2}: {spec.kind.name} needs at least two points per block"
        )


class PartitionTable:
    """Bellman tables for every block count ``1..k_max``.

    ``cost[k-1, j]`` is the optimal score of splitting points ``0..j`` into
    ``k`` blocks and ``start[k-1, j]`` the first index of the last block in
    that optimum. Ties go to the smallest start index.
    """

    def __init__(self, data: WeightedSample, k_max: int, spec: ScoringSpec):
        N = data.N
        if k_max < 1:
            raise InfeasibleError("K must be at least 1")
        k_max = min(k_max, N)
        self.N = N
        self.spec = spec
        q = score_matrix(PrefixAccumulator(data), spec)
        cost = np.full((k_max, N), np.inf)
        start = np.zeros((k_max, N), dtype=np.int64)
        cost[0] = q[0]
        cols = np.arange(N)
        prev = np.empty(N)
        for k in range(1, k_max):
            prev[0] = np.inf
            prev[1:] = cost[k - 1, :-1]
            total = prev[:, None] + q
            best = np.argmin(total, axis=0)
            start[k] = best
            cost[k] = total[best, cols]
        self.cost = cost
        self.start = start

    @property
    def k_max(self) -> int:
        return self.cost.shape[0]

    def score(self, K: int) -> float:
        return float(self.cost[K - 1, self.N - 1])

    def partition(self, K: int) -> tuple[BlockPartition, float]:
        _check_k(self.N, K, self.spec)
        if K > self.k_max:
            raise InfeasibleError(f"table built only up to K={self.k_max}")
        score = self.score(K)
        if not np.isfinite(score):
            raise InfeasibleError(f"every {K}-block partition contains an infeasible block under {self.spec}")
        bounds = [self.N]
        j = self.N - 1
        for k in range(K - 1, -1, -1):
            i = int(self.start[k, j]) if k > 0 else 0
            bounds.append(i)
            j = i - 1
        return BlockPartition(np.array(bounds[::-1])), score


def dp_partition(data: WeightedSample, K: int, spec: ScoringSpec) -> tuple[BlockPartition, float]:
    """Partition minimising the summed block score over all K-block splits."""
    _check_k(data.N, K, spec)
    return PartitionTable(data, K, spec).partition(K)


def brute_force_partition(data: WeightedSample, K: int, spec: ScoringSpec) -> tuple[BlockPartition, float]:
    """Exhaustive search over all C(N-1, K-1) boundary placements.

    Test oracle for :func:`dp_partition`; refuses N above 20.
    """
    N = data.N
    if N > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force refused for N={N} > {BRUTE_FORCE_MAX_N}")
    if not 1 <= K <= N:
        raise InfeasibleError(f"K={K} outside 1..{N}")
    q = score_matrix(PrefixAccumulator(data), spec)
    best_key = None
    best = None
    for inner in combinations(range(1, N), K - 1):
        bounds = (0, *inner, N)
        total = 0.0
        for a, b in zip(bounds[:-1], bounds[1:]):
            total += q[a, b - 1]
        # smallest score, then smallest last-block start, then the one before...
        key = (total, bounds[::-1])
        if best_key is None or key < best_key:
            best_key, best = key, bounds
    if not np.isfinite(best_key[0]):
        raise InfeasibleError(f"every {K}-block partition contains an infeasible block under {spec}")
    return BlockPartition(np.array(best)), best_key[0]
