"""Excess-kurtosis measures of single-neuron selectivity and population
sparseness.

Selectivity is the excess kurtosis of one neuron's responses across
stimuli (a column statistic); sparseness is the excess kurtosis of the
population response to one stimulus (a row statistic). Both use
population (1/N) central moments:

    kurt = m4 / m2^2 - 3

which is scale- and shift-invariant and bounded below by -2. Dividing
each neuron by its mean response therefore never changes selectivity,
but generally does change sparseness.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import BoundsError, DegenerateDataError, InsufficientDataError
from .matrix import ResponseMatrix, SubsampleSpec, normalize_per_neuron, remove_dead_neurons, subsample
from .randomness import derive_seed

AXIS_NEURON = "neuron"
AXIS_IMAGE = "image"


@dataclass(frozen=True)
class KurtosisSummary:
    """Per-vector excess kurtosis plus aggregates.

    ``axis='neuron'`` means one value per column (selectivity);
    ``axis='image'`` one per row (sparseness). Degenerate vectors are
    listed in ``skipped`` and excluded from the aggregates; an all-skipped
    input yields an empty summary with NaN aggregates.
    """

    per_vector: np.ndarray
    mean: float
    median: float
    n_vectors: int
    n_samples_per_vector: int
    axis: str
    normalized: bool
    skipped: tuple[int, ...] = ()

    def to_json(self, histogram_bins: int = 30) -> dict:
        if self.n_vectors:
            counts, edges = np.histogram(self.per_vector, bins=histogram_bins)
        else:
            counts, edges = np.array([], dtype=int), np.array([])
        return {
            "axis": self.axis,
            "normalized": self.normalized,
            "n_vectors": self.n_vectors,
            "mean": self.mean,
            "median": self.median,
            "histogram": {"bin_edges": edges.tolist(), "counts": counts.tolist()},
            "skipped": list(self.skipped),
        }


def excess_kurtosis(v) -> float:
    """Excess kurtosis of one response vector (population moments)."""
    v = np.ascontiguousarray(v, dtype=np.float64).reshape(-1, 1)
    if v.shape[0] < 4:
        raise InsufficientDataError(f"kurtosis needs >= 4 samples, got {v.shape[0]}")
    kurt, valid = _kernels.column_kurtosis(v)
    if not valid[0]:
        raise DegenerateDataError("kurtosis undefined for a constant vector (zero variance)")
    return float(kurt[0])


def _summary(vectors: np.ndarray, n_samples: int, axis: str, normalized: bool) -> KurtosisSummary:
    # vectors laid out as columns: one kurtosis per column
    kurt, valid = _kernels.column_kurtosis(np.ascontiguousarray(vectors))
    per_vector = kurt[valid]
    skipped = tuple(int(j) for j in np.flatnonzero(~valid))
    n = int(valid.sum())
    mean = float(per_vector.mean()) if n else float("nan")
    median = float(np.median(per_vector)) if n else float("nan")
    return KurtosisSummary(
        per_vector=per_vector,
        mean=mean,
        median=median,
        n_vectors=n,
        n_samples_per_vector=n_samples,
        axis=axis,
        normalized=normalized,
        skipped=skipped,
    )


def selectivity_kurtosis(m: ResponseMatrix) -> KurtosisSummary:
    """One excess kurtosis per neuron (column), aggregated over neurons."""
    if m.n_stimuli < 4:
        raise InsufficientDataError(f"selectivity needs >= 4 stimuli, got {m.n_stimuli}")
    return _summary(m.values, m.n_stimuli, AXIS_NEURON, normalized=False)


def sparseness_kurtosis(m: ResponseMatrix, normalized: bool = False) -> KurtosisSummary:
    """One excess kurtosis per stimulus (row), aggregated over stimuli.

    With ``normalized`` each neuron is first divided by its mean response;
    dead neurons must be removed beforehand.
    """
    if m.n_neurons < 4:
        raise InsufficientDataError(f"sparseness needs >= 4 neurons, got {m.n_neurons}")
    if normalized:
        m = normalize_per_neuron(m)
    return _summary(m.values.T, m.n_neurons, AXIS_IMAGE, normalized=normalized)


@dataclass(frozen=True)
class KurtosisGrid:
    """Mean/median kurtosis as a function of dataset size.

    Selectivity varies the image count at full neuron count; sparseness
    varies the neuron count at full image count. Each entry is the mean
    over ``repeats`` independent subsamples of the per-draw aggregate
    (mean-of-means and mean-of-medians are both kept).
    """

    image_sizes: tuple[int, ...]
    neuron_sizes: tuple[int, ...]
    repeats: int
    seed: int
    normalized: bool
    mean_selectivity: np.ndarray
    median_selectivity: np.ndarray
    mean_sparseness: np.ndarray
    median_sparseness: np.ndarray

    def to_csv_rows(self):
        header = ["axis", "size", "mean_kurtosis", "median_kurtosis"]
        rows = [header]
        for size, mn, md in zip(self.image_sizes, self.mean_selectivity, self.median_selectivity):
            rows.append([AXIS_NEURON, size, repr(float(mn)), repr(float(md))])
        for size, mn, md in zip(self.neuron_sizes, self.mean_sparseness, self.median_sparseness):
            rows.append([AXIS_IMAGE, size, repr(float(mn)), repr(float(md))])
        return rows


def _draw_summary(m, n_rows, n_cols, sub_seed, repeat, normalized, axis):
    spec = SubsampleSpec(n_rows=n_rows, n_cols=n_cols, seed=sub_seed, repeat_index=repeat)
    sub = subsample(m, spec)
    try:
        if normalized:
            sub, _ = remove_dead_neurons(sub)
            sub = normalize_per_neuron(sub)
        if axis == AXIS_NEURON:
            return selectivity_kurtosis(sub)
        return sparseness_kurtosis(sub)
    except (DegenerateDataError, InsufficientDataError):
        return None


def kurtosis_grid(
    m: ResponseMatrix,
    image_sizes,
    neuron_sizes,
    repeats: int,
    seed: int,
    normalized: bool = False,
    threads: int = 1,
) -> KurtosisGrid:
    """Resampling protocol: repeat subsampling at each dataset size.

    Every (size, repeat) cell draws an independent subsample from a seed
    derived from (seed, axis, size index, repeat), so results are
    identical regardless of scheduling.
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

    tasks = []
    for si, size in enumerate(image_sizes):
        for rep in range(repeats):
            tasks.append((AXIS_NEURON, si, rep, size, m.n_neurons, derive_seed(seed, 1, si, rep)))
    for sj, size in enumerate(neuron_sizes):
        for rep in range(repeats):
            tasks.append((AXIS_IMAGE, sj, rep, m.n_stimuli, size, derive_seed(seed, 2, sj, rep)))

    def run(task):
        axis, _, rep, n_rows, n_cols, sub_seed = task
        return _draw_summary(m, n_rows, n_cols, sub_seed, rep, normalized, axis)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(t) for t in tasks]

    def aggregate(axis, n_sizes):
        means = np.full(n_sizes, np.nan)
        medians = np.full(n_sizes, np.nan)
        per_size_means = [[] for _ in range(n_sizes)]
        per_size_medians = [[] for _ in range(n_sizes)]
        for task, summary in zip(tasks, results):
            if task[0] != axis or summary is None or summary.n_vectors == 0:
                continue
            per_size_means[task[1]].append(summary.mean)
            per_size_medians[task[1]].append(summary.median)
        for i in range(n_sizes):
            if per_size_means[i]:
                means[i] = float(np.mean(per_size_means[i]))
                medians[i] = float(np.mean(per_size_medians[i]))
        return means, medians

    mean_sel, median_sel = aggregate(AXIS_NEURON, len(image_sizes))
    mean_spa, median_spa = aggregate(AXIS_IMAGE, len(neuron_sizes))
    return KurtosisGrid(
        image_sizes=image_sizes,
        neuron_sizes=neuron_sizes,
        repeats=repeats,
        seed=seed,
        normalized=normalized,
        mean_selectivity=mean_sel,
        median_selectivity=median_sel,
        mean_sparseness=mean_spa,
        median_sparseness=median_spa,
    )
