"""Reference partitions: equal weighted quantiles and 1-D agglomerative clustering."""
from __future__ import annotations

import heapq

import numpy as np

from .errors import InfeasibleError
from .model import BlockPartition, WeightedSample

LINKAGES = ("average", "complete")


def quantile_partition(data: WeightedSample, K: int) -> BlockPartition:
    """Split at the first indices whose cumulative weight reaches k*W/K.

    A boundary that collides with the previous one is pushed forward by one
    index so that every block stays nonempty.
    """
    N = data.N
    if not 1 <= K <= N:
        raise InfeasibleError(f"K={K} outside 1..{N}")
    cum = np.cumsum(data.ys)
    W = cum[-1]
    bounds = [0]
    for k in range(1, K):
        b = int(np.searchsorted(cum, k * W / K, side="left")) + 1
        b = max(b, bounds[-1] + 1)
        if b > N - (K - k):
            raise InfeasibleError(f"cannot place {K} nonempty quantile blocks on {N} points")
        bounds.append(b)
    bounds.append(N)
    return BlockPartition(np.array(bounds))


def hierarchical_partition(data: WeightedSample, K: int, linkage: str = "average") -> BlockPartition:
    """Agglomerative clustering of sorted points down to K interval clusters.

    Only adjacent clusters are ever merged: on a line, for ordered clusters
    A < B < C both linkages satisfy d(A, C) > max(d(A, B), d(B, C)), so the
    globally closest pair is always adjacent. Complete linkage is the span
    of the merged interval; count-weighted average linkage reduces to the
    distance between the two clusters' weighted means.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}")
    N = data.N
    if not 1 <= K <= N:
        raise InfeasibleError(f"K={K} outside 1..{N}")
    xs, ys = data.xs, data.ys

    # interval clusters as a doubly linked list keyed by first index
    first = list(range(N))
    last = list(range(N))
    wsum = [float(y) for y in ys]
    xsum = [float(x * y) for x, y in zip(xs, ys)]
    cnt = [1] * N
    usum = [float(x) for x in xs]
    nxt = list(range(1, N)) + [-1]
    prv = [-1] + list(range(N - 1))
    alive = [True] * N
    version = [0] * N

    def center(c):
        # zero-weight clusters fall back to their unweighted mean
        return xsum[c] / wsum[c] if wsum[c] > 0 else usum[c] / cnt[c]

    def dist(a, b):
        if linkage == "complete":
            return xs[last[b]] - xs[first[a]]
        return center(b) - center(a)

    heap = [(dist(c, nxt[c]), c, 0, 0) for c in range(N - 1)]
    heapq.heapify(heap)
    clusters = N
    while clusters > K:
        d, a, va, vb = heapq.heappop(heap)
        b = nxt[a] if alive[a] else -1
        if b < 0 or version[a] != va or version[b] != vb:
            continue
        # merge b into a
        last[a] = last[b]
        wsum[a] += wsum[b]
        xsum[a] += xsum[b]
        usum[a] += usum[b]
        cnt[a] += cnt[b]
        alive[b] = False
        nxt[a] = nxt[b]
        if nxt[b] >= 0:
            prv[nxt[b]] = a
        version[a] += 1
        clusters -= 1
        p = prv[a]
        if p >= 0:
            heapq.heappush(heap, (dist(p, a), p, version[p], version[a]))
        if nxt[a] >= 0:
            n = nxt[a]
            heapq.heappush(heap, (dist(a, n), a, version[a], version[n]))

    bounds = [c for c in range(N) if alive[c]] + [N]
    return BlockPartition(np.array(bounds))
