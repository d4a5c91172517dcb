import numpy as np
import pytest
from scipy.cluster.hierarchy import fcluster, linkage

from dpmix import (
    InfeasibleError,
    WeightedSample,
    blocks_to_params,
    hierarchical_partition,
    quantile_partition,
)


def unit(xs):
    return WeightedSample(xs, np.ones(len(xs)))


def blocks(part):
    return [(a + 1, b) for a, b in part.blocks()]  # 1-based inclusive, as in hand calculations


class TestQuantiles:
    def test_even_split(self):
        assert blocks(quantile_partition(unit(np.arange(10.0)), 2)) == [(1, 5), (6, 10)]

    def test_thirds(self):
        # thresholds 10/3 and 20/3 are first reached at 4 and 7
        assert blocks(quantile_partition(unit(np.arange(10.0)), 3)) == [(1, 4), (5, 7), (8, 10)]

    def test_heavy_first_point(self):
        d = WeightedSample([0.0, 1.0, 2.0, 3.0], [9.0, 1.0, 1.0, 1.0])
        assert blocks(quantile_partition(d, 2)) == [(1, 1), (2, 4)]

    def test_collision_advances(self):
        d = WeightedSample([0.0, 1.0, 2.0, 3.0], [97.0, 1.0, 1.0, 1.0])
        part = quantile_partition(d, 3)
        assert part.boundaries.tolist() == [0, 1, 2, 4]

    def test_k_equals_n(self):
        assert quantile_partition(unit(np.arange(5.0)), 5).sizes.tolist() == [1] * 5

    def test_k_too_large(self):
        with pytest.raises(InfeasibleError):
            quantile_partition(unit([0.0, 1.0]), 3)

    def test_balanced_blocks(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            n = int(rng.integers(5, 200))
            k = int(rng.integers(1, n + 1))
            d = unit(np.sort(rng.normal(size=n)) + np.arange(n) * 1e-9)
            part = quantile_partition(d, k)
            bw = np.array([d.ys[a:b].sum() for a, b in part.blocks()])
            assert np.all(np.abs(bw - n / k) <= 1.0 + 1e-9)


class TestHierarchical:
    def test_complete_three_points(self):
        assert blocks(hierarchical_partition(unit([0.0, 1.0, 10.0]), 2, "complete")) == [(1, 2), (3, 3)]

    def test_average_two_groups(self):
        d = unit([0.0, 1.0, 2.0, 10.0, 11.0])
        assert blocks(hierarchical_partition(d, 2, "average")) == [(1, 3), (4, 5)]

    @pytest.mark.parametrize("link", ["average", "complete"])
    def test_k_equals_n(self, link):
        assert hierarchical_partition(unit(np.arange(6.0)), 6, link).sizes.tolist() == [1] * 6

    def test_unknown_linkage(self):
        with pytest.raises(ValueError):
            hierarchical_partition(unit([0.0, 1.0]), 1, "single")

    @pytest.mark.parametrize("link", ["average", "complete"])
    def test_matches_unrestricted_agglomeration(self, link):
        rng = np.random.default_rng(42)
        for _ in range(40):
            n = int(rng.integers(3, 65))
            xs = np.sort(rng.normal(size=n) * rng.uniform(0.5, 5) + rng.integers(0, 4, n) * 6.0)
            xs = np.unique(xs)
            n = len(xs)
            k = int(rng.integers(1, n + 1))
            ref = fcluster(linkage(xs[:, None], method=link), k, criterion="maxclust")
            # scipy labels are arbitrary; compare the induced block boundaries
            ref_bounds = [0] + [i for i in range(1, n) if ref[i] != ref[i - 1]] + [n]
            ours = hierarchical_partition(unit(xs), k, link)
            assert ours.boundaries.tolist() == ref_bounds

    def test_weighted_average_equals_replicated(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(4, 30))
            xs = np.unique(rng.normal(size=n) * 4)
            ys = rng.integers(1, 4, size=len(xs)).astype(float)
            k = int(rng.integers(1, len(xs) + 1))
            ours = hierarchical_partition(WeightedSample(xs, ys), k, "average")
            rep = np.repeat(xs, ys.astype(int))
            # replicated copies of one value sit at distance 0, so scipy merges them first
            ref = fcluster(linkage(rep[:, None], method="average"), k, criterion="maxclust")
            first = np.concatenate([[0], np.cumsum(ys.astype(int))[:-1]])
            lab = ref[first]
            ref_bounds = [0] + [i for i in range(1, len(xs)) if lab[i] != lab[i - 1]] + [len(xs)]
            assert ours.boundaries.tolist() == ref_bounds


def test_reference_partitions_give_valid_params():
    rng = np.random.default_rng(5)
    d = WeightedSample.from_observations(np.concatenate([rng.normal(0, 1, 300), rng.normal(6, 0.3, 100)]))
    for part in (
        quantile_partition(d, 4),
        hierarchical_partition(d, 4, "average"),
        hierarchical_partition(d, 4, "complete"),
    ):
        p = blocks_to_params(d, part)
        assert p.K == 4 and abs(p.weights.sum() - 1) <= 1e-12
