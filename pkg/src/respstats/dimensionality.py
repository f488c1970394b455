"""PCA intrinsic dimensionality against a reshuffled null.

The eigenvalue spectrum of the response covariance (neurons as
variables, stimuli as observations) is compared rank by rank with the
spectrum of the same matrix after each column was independently
permuted. Both spectra are normalized to sum to 1; the leading ranks
where the original eigenvalue stays above the shuffled one carry signal,
and their count is the intrinsic dimensionality. Estimates over a grid
of (image count, neuron count) subsamples form a dimensionality surface
for asymptotic extrapolation.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, DataFormatError, DegenerateDataError
from .matrix import ResponseMatrix, SubsampleSpec, remove_dead_neurons, shuffle_within_columns, subsample
from .randomness import derive_seed


@dataclass(frozen=True)
class EigenSpectrum:
    """Descending covariance eigenvalues, normalized to unit sum."""

    eigenvalues: np.ndarray
    n_components: int


@dataclass(frozen=True)
class IdEstimate:
    dimensionality: int
    original_spectrum: EigenSpectrum
    shuffled_spectrum: EigenSpectrum
    seed: int


@dataclass(frozen=True)
class IdSurface:
    """Mean intrinsic dimensionality over an (image size, neuron size) grid.

    Cells whose repeats all degenerated hold NaN with ``n_valid`` 0; they
    are never silently zeroed.
    """

    image_sizes: tuple[int, ...]
    neuron_sizes: tuple[int, ...]
    repeats: int
    seed: int
    mean_dimensionality: np.ndarray
    n_valid: np.ndarray

    def to_csv_rows(self):
        rows = [["image_size", "neuron_size", "mean_dimensionality", "n_valid_repeats"]]
        for i, s_img in enumerate(self.image_sizes):
            for j, s_neu in enumerate(self.neuron_sizes):
                rows.append(
                    [s_img, s_neu, repr(float(self.mean_dimensionality[i, j])), int(self.n_valid[i, j])]
                )
        return rows


def surface_from_csv_rows(rows) -> IdSurface:
    """Rebuild a surface from its CSV export (repeats/seed not recorded
    there, so they read back as 0)."""
    body = list(rows)
    if not body:
        raise DataFormatError("empty surface table")
    if body[0][:2] == ["image_size", "neuron_size"]:
        body = body[1:]
    cells = {}
    for row in body:
        if len(row) < 4:
            raise DataFormatError(f"surface row needs 4 columns, got {row!r}")
        cells[(int(row[0]), int(row[1]))] = (float(row[2]), int(row[3]))
    image_sizes = tuple(sorted({i for i, _ in cells}))
    neuron_sizes = tuple(sorted({j for _, j in cells}))
    mean = np.full((len(image_sizes), len(neuron_sizes)), np.nan)
    n_valid = np.zeros((len(image_sizes), len(neuron_sizes)), dtype=int)
    for (si, sj), (v, n) in cells.items():
        mean[image_sizes.index(si), neuron_sizes.index(sj)] = v
        n_valid[image_sizes.index(si), neuron_sizes.index(sj)] = n
    return IdSurface(
        image_sizes=image_sizes,
        neuron_sizes=neuron_sizes,
        repeats=0,
        seed=0,
        mean_dimensionality=mean,
        n_valid=n_valid,
    )


def eigen_spectrum(
    m: ResponseMatrix, center: bool = True, neurons_as_variables: bool = True
) -> EigenSpectrum:
    """Covariance eigenvalues of the response matrix, unit-normalized.

    Neurons are the variables and stimuli the observations by default;
    ``neurons_as_variables=False`` transposes the roles. Centering
    removes each variable's mean first (uncentered PCA conflates mean
    response with variance structure).
    """
    x = m.values if neurons_as_variables else m.values.T
    n_obs, n_var = x.shape
    if n_obs < 2 and center:
        raise DegenerateDataError("centered PCA needs at least 2 observations")
    if center:
        x = x - x.mean(axis=0)
        n_components = min(n_obs - 1, n_var)
    else:
        n_components = min(n_obs, n_var)
    svals = np.linalg.svd(x, compute_uv=False)
    power = svals * svals
    total = power.sum()
    if total <= 0.0:
        raise DegenerateDataError("zero total variance (constant matrix)")
    eig = power[:n_components] / total
    return EigenSpectrum(eigenvalues=eig, n_components=n_components)


def estimate_id(
    m: ResponseMatrix,
    seed: int,
    n_shuffles: int = 1,
    center: bool = True,
    neurons_as_variables: bool = True,
    shuffle_scope: str = "columns",
) -> IdEstimate:
    """Count leading ranks where the original spectrum beats the null.

    The null reshuffles each column independently (one shuffle is enough
    in practice; ``n_shuffles`` averages several). The dimensionality is
    the first rank at which the original eigenvalue drops to or below the
    shuffled one; ties break toward the smaller dimensionality.
    """
    if n_shuffles < 1:
        raise BoundsError("n_shuffles must be >= 1")
    orig = eigen_spectrum(m, center=center, neurons_as_variables=neurons_as_variables)
    acc = np.zeros_like(orig.eigenvalues)
    for s in range(n_shuffles):
        null = shuffle_within_columns(m, derive_seed(seed, s), scope=shuffle_scope)
        spec = eigen_spectrum(null, center=center, neurons_as_variables=neurons_as_variables)
        acc += spec.eigenvalues
    shuffled = EigenSpectrum(eigenvalues=acc / n_shuffles, n_components=orig.n_components)

    crossed = np.flatnonzero(orig.eigenvalues <= shuffled.eigenvalues)
    dimensionality = int(crossed[0]) if crossed.size else orig.n_components
    return IdEstimate(
        dimensionality=dimensionality,
        original_spectrum=orig,
        shuffled_spectrum=shuffled,
        seed=seed,
    )


def variance_explained(m: ResponseMatrix, top_m: int, **spectrum_kwargs) -> float:
    """Fraction of variance carried by the leading ``top_m`` components."""
    spec = eigen_spectrum(m, **spectrum_kwargs)
    if not (0 <= top_m <= spec.n_components):
        raise BoundsError(f"top_m={top_m} outside [0, {spec.n_components}]")
    return float(spec.eigenvalues[:top_m].sum())


def id_surface(
    m: ResponseMatrix,
    image_sizes,
    neuron_sizes,
    repeats: int,
    seed: int,
    threads: int = 1,
    center: bool = True,
    neurons_as_variables: bool = True,
) -> IdSurface:
    """Mean estimate over independent subsamples for every grid cell.

    Dead neurons are removed per draw; draws that degenerate anyway
    (constant subsample, all-dead) are dropped from the cell mean and
    tracked via ``n_valid``. Per-cell seeds derive from
    (seed, cell, repeat), so any execution order gives the same surface.
    """
    image_sizes = tuple(int(s) for s in image_sizes)
    neuron_sizes = tuple(int(s) for s in neuron_sizes)
    if repeats < 1:
        raise BoundsError("repeats must be >= 1")
    for s in image_sizes:
        if not (1 <= s <= m.n_stimuli):
            raise BoundsError(f"image size {s} outside [1, {m.n_stimuli}]")
    for s in neuron_sizes:
        if not (1 <= s <= m.n_neurons):
            raise BoundsError(f"neuron size {s} outside [1, {m.n_neurons}]")

    def run_cell(cell):
        i, j = cell
        values = []
        for rep in range(repeats):
            spec = SubsampleSpec(
                n_rows=image_sizes[i],
                n_cols=neuron_sizes[j],
                seed=derive_seed(seed, 1, i, j, rep),
            )
            sub = subsample(m, spec)
            try:
                sub, _ = remove_dead_neurons(sub)
                est = estimate_id(
                    sub,
                    seed=derive_seed(seed, 2, i, j, rep),
                    center=center,
                    neurons_as_variables=neurons_as_variables,
                )
            except DegenerateDataError:
                continue
            values.append(est.dimensionality)
        return values

    cells = [(i, j) for i in range(len(image_sizes)) for j in range(len(neuron_sizes))]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run_cell, cells))
    else:
        outcomes = [run_cell(c) for c in cells]

    mean = np.full((len(image_sizes), len(neuron_sizes)), np.nan)
    n_valid = np.zeros((len(image_sizes), len(neuron_sizes)), dtype=int)
    for (i, j), values in zip(cells, outcomes):
        n_valid[i, j] = len(values)
        if values:
            mean[i, j] = float(np.mean(values))
    return IdSurface(
        image_sizes=image_sizes,
        neuron_sizes=neuron_sizes,
        repeats=repeats,
        seed=seed,
        mean_dimensionality=mean,
        n_valid=n_valid,
    )
