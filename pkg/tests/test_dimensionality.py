import numpy as np
import pytest

from respstats import (
    BoundsError,
    DegenerateDataError,
    ResponseMatrix,
    eigen_spectrum,
    estimate_id,
    id_surface,
    variance_explained,
)
from respstats.dimensionality import surface_from_csv_rows
from respstats.randomness import derive_seed

from conftest import planted_matrix


def two_component_matrix():
    # two orthogonal, zero-mean, equal-power directions; centering leaves
    # them untouched, so the spectrum is exactly (1/2, 1/2, 0, ...)
    u1 = np.array([1.0, -1.0, 1.0, -1.0, 1.0, -1.0])
    u2 = np.array([1.0, 1.0, -1.0, -1.0, 1.0, -1.0])
    u2 = u2 - u2 @ u1 / (u1 @ u1) * u1
    u1 /= np.linalg.norm(u1)
    u2 /= np.linalg.norm(u2)
    v1 = np.zeros(5)
    v1[0] = 1.0
    v2 = np.zeros(5)
    v2[1] = 1.0
    return ResponseMatrix(np.outer(u1, v1) + np.outer(u2, v2))


class TestEigenSpectrum:
    def test_rank_one(self):
        m = ResponseMatrix(np.outer([1.0, 2.0, 3.0, 4.0], [2.0, -1.0, 0.5]))
        spec = eigen_spectrum(m)
        assert spec.n_components == 3
        assert spec.eigenvalues[0] == pytest.approx(1.0, abs=1e-12)
        assert np.all(spec.eigenvalues[1:] < 1e-12)

    def test_two_equal_components(self):
        spec = eigen_spectrum(two_component_matrix())
        assert np.allclose(spec.eigenvalues[:2], 0.5, atol=1e-10)
        assert np.all(spec.eigenvalues[2:] < 1e-10)

    def test_constant_matrix(self):
        with pytest.raises(DegenerateDataError):
            eigen_spectrum(ResponseMatrix(np.full((5, 4), 7.0)))

    def test_normalized_and_sorted(self, rng):
        spec = eigen_spectrum(ResponseMatrix(rng.standard_normal((30, 12))))
        assert spec.eigenvalues.sum() == pytest.approx(1.0, abs=1e-10)
        assert np.all(np.diff(spec.eigenvalues) <= 1e-15)
        assert spec.n_components == 12

    def test_component_count_centered(self, rng):
        m = ResponseMatrix(rng.standard_normal((5, 10)))
        assert eigen_spectrum(m).n_components == 4  # min(S-1, N)
        assert eigen_spectrum(m, center=False).n_components == 5

    def test_transposed_orientation(self, rng):
        m = ResponseMatrix(rng.standard_normal((6, 9)))
        spec = eigen_spectrum(m, neurons_as_variables=False)
        assert spec.n_components == min(9 - 1, 6)

    def test_row_permutation_invariance(self, rng):
        values = rng.standard_normal((25, 10))
        perm = rng.permutation(25)
        a = eigen_spectrum(ResponseMatrix(values))
        b = eigen_spectrum(ResponseMatrix(values[perm]))
        assert np.allclose(a.eigenvalues, b.eigenvalues, atol=1e-10)

    def test_column_permutation_invariance(self, rng):
        values = rng.standard_normal((25, 10))
        perm = rng.permutation(10)
        a = eigen_spectrum(ResponseMatrix(values))
        b = eigen_spectrum(ResponseMatrix(values[:, perm]))
        assert np.allclose(a.eigenvalues, b.eigenvalues, atol=1e-10)


class TestEstimateId:
    def test_planted_rank_five_across_seeds(self):
        rng = np.random.default_rng(77)
        base = planted_matrix(rng, 200, 100, 5, 0.0)
        for s in range(10):
            noisy = base + 1e-6 * np.random.default_rng(1000 + s).standard_normal((200, 100))
            est = estimate_id(ResponseMatrix(noisy), seed=s)
            assert est.dimensionality == 5

    def test_iid_noise_null(self):
        # original and shuffled spectra are exchangeable on i.i.d. data
        estimates = [
            estimate_id(
                ResponseMatrix(np.random.default_rng(s).standard_normal((200, 100))), seed=s
            ).dimensionality
            for s in range(10)
        ]
        assert sum(1 for e in estimates if e <= 3) >= 9

    def test_two_by_two(self):
        est = estimate_id(ResponseMatrix(np.array([[0.0, 1.0], [2.0, 0.5]])), seed=0)
        assert est.original_spectrum.n_components == 1
        assert est.dimensionality in (0, 1)

    def test_common_column_scaling_identical(self, rng):
        values = rng.standard_normal((60, 30)) + planted_matrix(rng, 60, 30, 3, 0.0)
        a = estimate_id(ResponseMatrix(values), seed=4)
        b = estimate_id(ResponseMatrix(values * 13.7), seed=4)
        assert a.dimensionality == b.dimensionality

    def test_deterministic(self, rng):
        m = ResponseMatrix(rng.standard_normal((50, 20)))
        assert estimate_id(m, seed=9).dimensionality == estimate_id(m, seed=9).dimensionality

    def test_multiple_shuffles(self, rng):
        m = ResponseMatrix(planted_matrix(rng, 100, 40, 4, 0.01))
        est = estimate_id(m, seed=1, n_shuffles=5)
        assert est.dimensionality == 4
        assert est.shuffled_spectrum.eigenvalues.sum() == pytest.approx(1.0, abs=1e-9)

    def test_spectra_attached(self, rng):
        m = ResponseMatrix(rng.standard_normal((30, 10)))
        est = estimate_id(m, seed=0)
        assert est.original_spectrum.eigenvalues.shape == (10,)
        assert est.shuffled_spectrum.eigenvalues.shape == (10,)


class TestVarianceExplained:
    def test_rank_one_all_in_first(self):
        m = ResponseMatrix(np.outer([1.0, 2.0, 4.0], [1.0, 3.0]))
        assert variance_explained(m, 1) == pytest.approx(1.0, abs=1e-12)

    def test_completeness(self, rng):
        m = ResponseMatrix(rng.standard_normal((20, 8)))
        assert variance_explained(m, 8) == pytest.approx(1.0, abs=1e-10)

    def test_two_component_half(self):
        assert variance_explained(two_component_matrix(), 1) == pytest.approx(0.5, abs=1e-10)

    def test_bounds(self, rng):
        m = ResponseMatrix(rng.standard_normal((20, 8)))
        with pytest.raises(BoundsError):
            variance_explained(m, 9)


class TestIdSurface:
    def test_degenerate_grid_equals_single_estimate(self, rng):
        m = ResponseMatrix(planted_matrix(rng, 60, 30, 3, 0.02))
        surf = id_surface(m, [60], [30], repeats=1, seed=5)
        est = estimate_id(m, seed=derive_seed(5, 2, 0, 0, 0))
        assert surf.mean_dimensionality[0, 0] == est.dimensionality
        assert surf.n_valid[0, 0] == 1

    def test_deterministic(self, rng):
        m = ResponseMatrix(rng.standard_normal((80, 40)))
        a = id_surface(m, [20, 40], [10, 20], repeats=3, seed=7)
        b = id_surface(m, [20, 40], [10, 20], repeats=3, seed=7)
        assert np.array_equal(a.mean_dimensionality, b.mean_dimensionality)

    def test_threads_schedule_independent(self, rng):
        m = ResponseMatrix(rng.standard_normal((80, 40)))
        a = id_surface(m, [20, 40, 60], [10, 20], repeats=4, seed=7, threads=1)
        b = id_surface(m, [20, 40, 60], [10, 20], repeats=4, seed=7, threads=4)
        assert np.array_equal(a.mean_dimensionality, b.mean_dimensionality)
        assert np.array_equal(a.n_valid, b.n_valid)

    def test_planted_rank_recovered_in_cells(self, rng):
        m = ResponseMatrix(planted_matrix(rng, 200, 100, 5, 0.005))
        surf = id_surface(m, [50, 120, 200], [20, 60, 100], repeats=3, seed=2)
        assert np.all(np.abs(surf.mean_dimensionality - 5.0) <= 1.0)
        assert np.all(surf.n_valid == 3)

    def test_degenerate_cells_flagged(self):
        # constant subsamples degenerate in every repeat: flagged, never zeroed
        m = ResponseMatrix(np.tile([[0.0, 0, 0, 1, 0, 0]], (10, 1)))
        surf = id_surface(m, [5, 10], [3, 6], repeats=2, seed=0)
        assert np.isnan(surf.mean_dimensionality).any()
        assert (surf.n_valid == 0).any()

    def test_dead_neurons_removed_per_draw(self, rng):
        values = np.abs(rng.standard_normal((60, 20))) + 0.5
        values[:, 7] = 0.0
        surf = id_surface(ResponseMatrix(values), [30, 60], [20], repeats=2, seed=3)
        assert np.isfinite(surf.mean_dimensionality).all()

    def test_bounds(self, rng):
        m = ResponseMatrix(rng.standard_normal((10, 10)))
        with pytest.raises(BoundsError):
            id_surface(m, [20], [5], repeats=1, seed=0)
        with pytest.raises(BoundsError):
            id_surface(m, [5], [5], repeats=0, seed=0)

    def test_csv_round_trip(self, rng):
        m = ResponseMatrix(rng.standard_normal((40, 20)))
        surf = id_surface(m, [10, 20], [5, 10], repeats=2, seed=1)
        rows = surf.to_csv_rows()
        again = surface_from_csv_rows([[str(c) for c in row] for row in rows])
        assert again.image_sizes == surf.image_sizes
        assert again.neuron_sizes == surf.neuron_sizes
        assert np.allclose(again.mean_dimensionality, surf.mean_dimensionality, equal_nan=True)
