import numpy as np
import pytest

from respstats import (
    BoundsError,
    ResponseMatrix,
    SyntheticSpec,
    analytic_truth,
    estimate_id,
    excess_kurtosis,
    generate,
)


class TestSpecValidation:
    def test_unknown_kind(self):
        with pytest.raises(BoundsError):
            SyntheticSpec("iid_cauchy", (10, 10), seed=0)

    def test_bad_shape(self):
        with pytest.raises(BoundsError):
            SyntheticSpec("iid_normal", (0, 10), seed=0)

    def test_bad_rank(self):
        with pytest.raises(BoundsError):
            SyntheticSpec("planted_rank", (10, 5), seed=0, params={"rank": 6})

    def test_bad_sigma(self):
        with pytest.raises(BoundsError):
            SyntheticSpec("gpd_tail", (10, 5), seed=0, params={"sigma": -1.0})

    def test_negative_noise(self):
        with pytest.raises(BoundsError):
            SyntheticSpec("planted_rank", (10, 5), seed=0, params={"rank": 2, "noise": -0.1})


class TestDeterminism:
    @pytest.mark.parametrize("kind", ["iid_normal", "iid_exponential", "iid_laplace", "gpd_tail"])
    def test_same_seed_same_matrix(self, kind):
        spec = SyntheticSpec(kind, (50, 20), seed=123)
        assert np.array_equal(generate(spec).values, generate(spec).values)

    def test_distinct_seeds_differ(self):
        a = generate(SyntheticSpec("iid_normal", (50, 20), seed=1))
        b = generate(SyntheticSpec("iid_normal", (50, 20), seed=2))
        assert not np.array_equal(a.values, b.values)


class TestAnalyticTruths:
    def test_exponential_kurtosis(self):
        spec = SyntheticSpec("iid_exponential", (10**4, 1), seed=0)
        truth = analytic_truth(spec)["excess_kurtosis"]
        assert truth == 6.0
        k = excess_kurtosis(generate(spec).values[:, 0])
        assert abs(k - truth) < 0.5

    def test_laplace_kurtosis(self):
        spec = SyntheticSpec("iid_laplace", (10**4, 1), seed=3)
        truth = analytic_truth(spec)["excess_kurtosis"]
        assert truth == 3.0
        k = excess_kurtosis(generate(spec).values[:, 0])
        assert abs(k - truth) < 0.4

    def test_normal_kurtosis(self):
        spec = SyntheticSpec("iid_normal", (10**4, 1), seed=4)
        assert analytic_truth(spec)["excess_kurtosis"] == 0.0
        assert abs(excess_kurtosis(generate(spec).values[:, 0])) < 0.15

    def test_gpd_truth_passthrough(self):
        spec = SyntheticSpec("gpd_tail", (10, 10), seed=0, params={"k": 0.3, "sigma": 2.0})
        truth = analytic_truth(spec)
        assert truth["tail_index"] == 0.3
        assert truth["sigma"] == 2.0

    def test_planted_truth(self):
        spec = SyntheticSpec("planted_rank", (30, 20), seed=0, params={"rank": 20})
        assert analytic_truth(spec)["dimensionality"] == 20


class TestGenerators:
    def test_gpd_values_respect_threshold(self):
        spec = SyntheticSpec("gpd_tail", (100, 10), seed=5, params={"k": 0.4, "theta": 2.0})
        m = generate(spec)
        assert np.all(m.values >= 2.0)

    def test_gpd_tail_growth_with_k_sign(self):
        # (1 - 1/n)-quantiles keep growing with n iff the tail is heavy
        def top_quantile(k, n, seed):
            spec = SyntheticSpec("gpd_tail", (n, 1), seed=seed, params={"k": k})
            return np.quantile(generate(spec).values[:, 0], 1 - 1 / n)

        grow_heavy = top_quantile(0.5, 10**5, 1) / top_quantile(0.5, 10**3, 1)
        grow_bounded = top_quantile(-0.2, 10**5, 1) / top_quantile(-0.2, 10**3, 1)
        assert grow_heavy > 3.0
        assert grow_bounded < 1.5  # bounded support saturates at sigma/0.2

    def test_planted_rank_exact_nonzero_eigenvalues(self):
        spec = SyntheticSpec("planted_rank", (60, 40), seed=9, params={"rank": 5, "noise": 0.0})
        m = generate(spec)
        svals = np.linalg.svd(m.values, compute_uv=False)
        assert np.all(svals[:5] > 1e-8)
        assert np.all(svals[5:] < svals[0] * 1e-10)

    def test_planted_rank_unit_power(self):
        spec = SyntheticSpec("planted_rank", (200, 100), seed=2, params={"rank": 7, "noise": 0.0})
        assert generate(spec).values.std() == pytest.approx(1.0, abs=1e-12)

    def test_planted_rank_recovered_by_estimator(self):
        spec = SyntheticSpec("planted_rank", (200, 100), seed=11, params={"rank": 5, "noise": 1e-6})
        est = estimate_id(generate(spec), seed=0)
        assert est.dimensionality == analytic_truth(spec)["dimensionality"]

    def test_scale_parameter(self):
        a = generate(SyntheticSpec("iid_exponential", (100, 2), seed=0, params={"scale": 1.0}))
        b = generate(SyntheticSpec("iid_exponential", (100, 2), seed=0, params={"scale": 2.0}))
        assert np.allclose(b.values, 2.0 * a.values)
