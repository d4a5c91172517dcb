import math

import numpy as np
import pytest
from scipy import stats

from dpmix import (
    BlockPartition,
    InvalidPartitionError,
    MixtureParams,
    WeightedSample,
    blocks_to_params,
    exact_binned_log_likelihood,
    log_likelihood,
    mixture_pdf,
)

STD_NORMAL = MixtureParams([1.0], [0.0], [1.0])


class TestMixtureParams:
    def test_valid(self):
        p = MixtureParams([0.3, 0.7], [0, 2], [1, 0.5])
        assert p.K == 2

    @pytest.mark.parametrize(
        "w, m, s",
        [
            ([0.5, 0.6], [0, 1], [1, 1]),
            ([0.0, 1.0], [0, 1], [1, 1]),
            ([0.5, 0.5], [0, 1], [1, 0]),
            ([0.5, 0.5], [0, 1], [1]),
            ([], [], []),
        ],
    )
    def test_invalid(self, w, m, s):
        with pytest.raises(ValueError):
            MixtureParams(w, m, s)

    def test_immutable(self):
        with pytest.raises(ValueError):
            STD_NORMAL.means[0] = 1.0


class TestWeightedSample:
    def test_from_observations_collapses_ties(self):
        d = WeightedSample.from_observations([3.0, 1.0, 3.0, 2.0, 3.0])
        np.testing.assert_array_equal(d.xs, [1, 2, 3])
        np.testing.assert_array_equal(d.ys, [1, 1, 3])
        np.testing.assert_array_equal(np.sort(d.expanded()), [1, 2, 3, 3, 3])

    @pytest.mark.parametrize(
        "xs, ys",
        [([0, 0], [1, 1]), ([1, 0], [1, 1]), ([0, 1], [-1, 2]), ([0, 1], [0, 0])],
    )
    def test_invalid(self, xs, ys):
        with pytest.raises(ValueError):
            WeightedSample(xs, ys)

    def test_bin_width_checked(self):
        WeightedSample([0, 1, 2], [1, 1, 1], bin_width=1.0)
        with pytest.raises(ValueError):
            WeightedSample([0, 1, 2.5], [1, 1, 1], bin_width=1.0)


class TestBlockPartition:
    def test_blocks(self):
        p = BlockPartition([0, 2, 5])
        assert list(p.blocks()) == [(0, 2), (2, 5)]
        assert p.K == 2 and p.N == 5
        np.testing.assert_array_equal(p.labels(), [0, 0, 1, 1, 1])

    @pytest.mark.parametrize("b", [[1, 3], [0, 2, 2, 4], [0], [0, 3, 2]])
    def test_invalid(self, b):
        with pytest.raises(InvalidPartitionError):
            BlockPartition(b)


class TestMixturePdf:
    def test_standard_normal_mode(self):
        assert mixture_pdf(0.0, STD_NORMAL) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-14)

    def test_duplicate_components(self):
        p = MixtureParams([0.5, 0.5], [0, 0], [1, 1])
        assert mixture_pdf(0.0, p) == pytest.approx(mixture_pdf(0.0, STD_NORMAL), rel=1e-14)

    def test_two_component_value(self):
        p = MixtureParams([0.3, 0.7], [0, 2], [1, 0.5])
        expected = 0.3 * stats.norm.pdf(1, 0, 1) + 0.7 * stats.norm.pdf(1, 2, 0.5)
        assert mixture_pdf(1.0, p) == pytest.approx(expected, rel=1e-13)

    def test_vectorized_positive(self):
        p = MixtureParams([0.3, 0.7], [0, 2], [1, 0.5])
        xs = np.linspace(-20, 20, 101)
        f = mixture_pdf(xs, p)
        assert f.shape == xs.shape
        assert np.all(f > 0)


class TestLogLikelihood:
    def test_single_point(self):
        d = WeightedSample([0.0], [1.0])
        assert log_likelihood(d, STD_NORMAL) == pytest.approx(-0.918938533204673, rel=1e-14)

    def test_linear_in_counts(self):
        d = WeightedSample([-1.0, 0.5, 2.0], [1.0, 2.0, 3.0])
        d2 = WeightedSample(d.xs, 2 * d.ys)
        p = MixtureParams([0.4, 0.6], [0, 1], [1, 2])
        assert log_likelihood(d2, p) == 2 * log_likelihood(d, p)

    def test_weighted_pair(self):
        d = WeightedSample([-1.0, 1.0], [2.0, 3.0])
        expected = 2 * stats.norm.logpdf(-1) + 3 * stats.norm.logpdf(1)
        assert expected == pytest.approx(-7.094694, abs=1e-5)  # -5 * 1.418939 rounded
        assert log_likelihood(d, STD_NORMAL) == pytest.approx(expected, rel=1e-13)

    def test_matches_naive_sum_over_raw_observations(self):
        rng = np.random.default_rng(3)
        raw = np.round(rng.normal(size=500), 1)  # plenty of ties
        p = MixtureParams([0.2, 0.8], [-1, 0.5], [0.5, 1.2])
        naive = sum(math.log(0.2 * stats.norm.pdf(x, -1, 0.5) + 0.8 * stats.norm.pdf(x, 0.5, 1.2)) for x in raw)
        d = WeightedSample.from_observations(raw)
        assert d.N < len(raw)
        assert log_likelihood(d, p) == pytest.approx(naive, rel=1e-10)

    def test_far_tail_stays_finite(self):
        d = WeightedSample([0.0, 50.0], [1.0, 1.0])
        p = MixtureParams([0.5, 0.5], [0, 1], [0.01, 0.01])
        assert np.isfinite(log_likelihood(d, p))

    def test_overflowing_input_gives_minus_inf(self):
        d = WeightedSample([0.0, 1e200], [1.0, 1.0])
        assert log_likelihood(d, STD_NORMAL) == -np.inf


class TestExactBinned:
    def test_requires_bin_width(self):
        with pytest.raises(ValueError):
            exact_binned_log_likelihood(WeightedSample([0.0], [1.0]), STD_NORMAL)

    def test_dense_bin_at_mode(self):
        delta = 0.01
        p_n = stats.norm.cdf(0.005) - stats.norm.cdf(-0.005)
        assert p_n == pytest.approx(0.0039894, abs=1e-7)
        assert abs(delta * stats.norm.pdf(0) - p_n) / p_n < 1e-5
        d = WeightedSample([0.0], [1.0], bin_width=delta)
        assert exact_binned_log_likelihood(d, STD_NORMAL) == pytest.approx(math.log(p_n), rel=1e-12)

    def test_wide_bin_contribution_vanishes(self):
        d = WeightedSample([0.0], [1.0], bin_width=40.0)
        assert exact_binned_log_likelihood(d, STD_NORMAL) == pytest.approx(0.0, abs=1e-15)

    def test_symmetric_bins(self):
        d1 = WeightedSample([-1.5], [1.0], bin_width=0.5)
        d2 = WeightedSample([1.5], [1.0], bin_width=0.5)
        assert exact_binned_log_likelihood(d1, STD_NORMAL) == pytest.approx(
            exact_binned_log_likelihood(d2, STD_NORMAL), rel=1e-13
        )

    def test_far_right_tail_mass_is_accurate(self):
        d = WeightedSample([12.0], [1.0], bin_width=0.1)
        expected = math.log(stats.norm.sf(11.95) - stats.norm.sf(12.05))
        assert exact_binned_log_likelihood(d, STD_NORMAL) == pytest.approx(expected, rel=1e-10)

    def test_agrees_with_dense_approximation(self):
        rng = np.random.default_rng(11)
        sigma_min = 1.0
        delta = sigma_min / 20
        p = MixtureParams([0.3, 0.7], [0.0, 6.0], [1.0, 2.5])
        xs = np.arange(-8, 18, delta)
        ys = rng.poisson(2000 * delta * mixture_pdf(xs, p)).astype(float)
        d = WeightedSample(xs, ys, bin_width=delta)
        exact = exact_binned_log_likelihood(d, p) - ys.sum() * math.log(delta)
        dense = log_likelihood(d, p)
        assert exact == pytest.approx(dense, rel=1e-4)


class TestBlocksToParams:
    def test_two_blocks(self):
        d = WeightedSample([1, 2, 3, 10, 11, 12], np.ones(6))
        p = blocks_to_params(d, BlockPartition([0, 3, 6]))
        np.testing.assert_allclose(p.means, [2, 11], rtol=1e-15)
        np.testing.assert_allclose(p.stds, [math.sqrt(2 / 3)] * 2, rtol=1e-14)
        np.testing.assert_allclose(p.weights, [0.5, 0.5], rtol=1e-15)

    def test_single_block_is_grand_moments(self):
        rng = np.random.default_rng(0)
        xs = np.sort(rng.normal(size=30))
        ys = rng.integers(1, 5, size=30).astype(float)
        p = blocks_to_params(WeightedSample(xs, ys), BlockPartition([0, 30]))
        mu = np.average(xs, weights=ys)
        assert p.weights[0] == 1.0
        assert p.means[0] == pytest.approx(mu, rel=1e-13)
        assert p.stds[0] == pytest.approx(math.sqrt(np.average((xs - mu) ** 2, weights=ys)), rel=1e-12)

    def test_weighted_pair(self):
        p = blocks_to_params(WeightedSample([0.0, 1.0], [1.0, 3.0]), BlockPartition([0, 2]))
        assert p.means[0] == pytest.approx(0.75, rel=1e-15)
        assert p.stds[0] == pytest.approx(math.sqrt(0.25 * 0.75**2 + 0.75 * 0.25**2), rel=1e-14)
        assert p.stds[0] == pytest.approx(0.43301, abs=1e-5)

    def test_singleton_floored(self):
        d = WeightedSample([0, 1, 2], [1, 1, 1])
        p = blocks_to_params(d, BlockPartition([0, 1, 3]), sigma_min=0.01)
        assert p.stds[0] == 0.01

    def test_zero_weight_block_rejected(self):
        d = WeightedSample([0, 1, 2], [1, 0, 1])
        with pytest.raises(InvalidPartitionError):
            blocks_to_params(d, BlockPartition([0, 1, 2, 3]))

    def test_wrong_length_rejected(self):
        with pytest.raises(InvalidPartitionError):
            blocks_to_params(WeightedSample([0, 1, 2], [1, 1, 1]), BlockPartition([0, 2]))

    def test_weights_sum_and_unweighted_agreement(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            n = rng.integers(5, 60)
            xs = np.sort(rng.normal(size=n) * 10)
            k = rng.integers(1, n // 2 + 1)
            inner = np.sort(rng.choice(np.arange(1, n), size=k - 1, replace=False))
            part = BlockPartition(np.concatenate([[0], inner, [n]]))
            p = blocks_to_params(WeightedSample(xs, np.ones(n)), part, sigma_min=1e-300)
            assert abs(p.weights.sum() - 1) <= 1e-12
            for j, (a, b) in enumerate(part.blocks()):
                blk = xs[a:b]
                # unweighted block formulas: plain mean, population std, size / N
                assert p.means[j] == pytest.approx(blk.mean(), rel=1e-12, abs=1e-12)
                assert p.stds[j] == pytest.approx(blk.std(), rel=1e-12, abs=1e-12)
                assert p.weights[j] == pytest.approx(len(blk) / n, rel=1e-12)


def test_block_std_survives_huge_spread():
    d = WeightedSample([0.0, 1e200], [1.0, 1.0])
    p = blocks_to_params(d, BlockPartition([0, 2]))
    assert p.stds[0] == pytest.approx(5e199, rel=1e-12)
