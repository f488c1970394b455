"""Upper-tail heaviness via maximum-likelihood generalized-Pareto fits.

Responses above a high threshold theta are modeled with the GPD density

    f(r | k, sigma, theta) = (1/sigma) * (1 + k (r - theta) / sigma)^(-1 - 1/k)

whose shape parameter k is the tail index: k > 0 heavy (power-law) tail,
k = 0 the exponential boundary, k < 0 a bounded tail ending at
theta - sigma/k. The threshold is an empirical quantile (the tail start
is a modelling choice, not an estimated parameter).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import _kernels
from .errors import BoundsError, DegenerateDataError, InsufficientDataError
from .matrix import ResponseMatrix, normalize_per_neuron
from .randomness import derive_rng, derive_seed

DEFAULT_TAIL_FRACTION = 0.1
DEFAULT_MIN_EXCEEDANCES = 20
DEFAULT_MAX_RESTARTS = 10

AXIS_NEURON = "neuron"
AXIS_IMAGE = "image"


@dataclass(frozen=True)
class GpdFit:
    """Maximum-likelihood GPD tail fit for one response vector."""

    k: float
    sigma: float
    theta: float
    n_exceedances: int
    log_likelihood: float
    converged: bool

    def to_json(self, axis_index: int | None = None) -> dict:
        rec = {
            "k": self.k,
            "sigma": self.sigma,
            "theta": self.theta,
            "n_exceedances": self.n_exceedances,
            "log_likelihood": self.log_likelihood,
            "converged": self.converged,
        }
        if axis_index is not None:
            rec = {"axis_index": axis_index, **rec}
        return rec


def gpd_pdf(r, k: float, sigma: float, theta: float):
    """GPD density; 0 outside the support, exponential limit for k ~ 0."""
    if sigma <= 0:
        raise BoundsError("sigma must be positive")
    r = np.asarray(r, dtype=np.float64)
    y = (r - theta) / sigma
    if abs(k) < 1e-8:
        out = np.where(y >= 0, np.exp(-y) / sigma, 0.0)
    else:
        base = 1.0 + k * y
        inside = (y >= 0) & (base > 0)
        out = np.zeros_like(y)
        out[inside] = np.power(base[inside], -1.0 - 1.0 / k) / sigma
    return out if out.ndim else float(out)


def gpd_quantile(u, k: float, sigma: float, theta: float):
    """Inverse CDF; the sampling route used by the synthetic generators."""
    u = np.asarray(u, dtype=np.float64)
    if abs(k) < 1e-12:
        return theta - sigma * np.log1p(-u)
    return theta + sigma * (np.power(1.0 - u, -k) - 1.0) / k


def select_exceedances(
    v,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
    min_count: int = DEFAULT_MIN_EXCEEDANCES,
) -> tuple[float, np.ndarray]:
    """Threshold at the empirical (1 - tail_fraction) quantile.

    Uses linear interpolation between order statistics (the "type 7"
    rule). Returns the threshold and the values strictly above it, in
    original units.
    """
    if not 0.0 < tail_fraction < 1.0:
        raise BoundsError(f"tail_fraction must be in (0, 1), got {tail_fraction}")
    v = np.asarray(v, dtype=np.float64).ravel()
    if int(np.ceil(tail_fraction * v.size)) < min_count:
        raise InsufficientDataError(
            f"tail of {v.size} samples at fraction {tail_fraction} cannot reach "
            f"{min_count} exceedances"
        )
    theta = float(np.quantile(v, 1.0 - tail_fraction))
    exceedances = v[v > theta]
    if exceedances.size == 0:
        raise DegenerateDataError("no values above the threshold (constant upper tail)")
    if exceedances.size < min_count:
        raise InsufficientDataError(
            f"only {exceedances.size} exceedances above theta={theta}, need {min_count}"
        )
    return theta, exceedances


def _pwm_start(y: np.ndarray) -> tuple[float, float]:
    # probability-weighted moments of the excesses; k clipped to a sane
    # starting range, sigma kept positive
    n = y.size
    ys = np.sort(y)
    t0 = ys.mean()
    t1 = float(np.sum(ys * (n - np.arange(1.0, n + 1.0)) / (n - 1))) / n
    if t1 <= 0 or t0 <= 2 * t1:
        q = 3.0
    else:
        q = t0 / (2.0 * t1)
    k0 = (q - 2.0) / (q - 1.0)
    k0 = float(np.clip(k0, -0.9, 0.9))
    s0 = t0 * (1.0 - k0) if k0 < 1.0 else t0
    s0 = max(float(s0), 1e-300)
    if k0 < 0:
        # keep the bounded-tail start feasible: endpoint -s/k beyond max(y)
        s0 = max(s0, 1.05 * (-k0) * float(ys[-1]))
    return k0, s0


def fit_gpd(
    exceedances,
    theta: float,
    min_count: int = DEFAULT_MIN_EXCEEDANCES,
    max_restarts: int = DEFAULT_MAX_RESTARTS,
    seed: int = 0,
) -> GpdFit:
    """Maximize the GPD likelihood of the excesses over (k, log sigma).

    Nelder-Mead from a probability-weighted-moment start, with up to
    ``max_restarts`` perturbed restarts if the first search fails; the
    ``converged`` flag reports the optimizer status of the best attempt.
    """
    exceedances = np.ascontiguousarray(exceedances, dtype=np.float64).ravel()
    if exceedances.size < min_count:
        raise InsufficientDataError(
            f"{exceedances.size} exceedances below the minimum fit size {min_count}"
        )
    y = exceedances - theta
    if np.any(y <= 0):
        raise BoundsError("all exceedances must lie strictly above theta")
    if np.ptp(y) == 0.0:
        raise DegenerateDataError("all exceedances equal; tail has zero spread")

    k0, s0 = _pwm_start(y)
    rng = derive_rng(seed)
    best = None
    for attempt in range(max_restarts + 1):
        if attempt == 0:
            start = np.array([k0, np.log(s0)])
        else:
            start = np.array(
                [k0 + rng.uniform(-0.5, 0.5), np.log(s0) + rng.uniform(-1.0, 1.0)]
            )
        res = minimize(
            lambda p: _kernels.gpd_nll(y, p[0], p[1]),
            start,
            method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 5000, "maxfev": 10000},
        )
        if best is None or res.fun < best.fun:
            best = res
        if res.success and np.isfinite(res.fun):
            best = res
            break
    k_hat = float(best.x[0])
    sigma_hat = float(np.exp(best.x[1]))
    return GpdFit(
        k=k_hat,
        sigma=sigma_hat,
        theta=float(theta),
        n_exceedances=int(y.size),
        log_likelihood=float(-best.fun),
        converged=bool(best.success and np.isfinite(best.fun)),
    )


@dataclass(frozen=True)
class TailSummary:
    """Tail indices across one matrix axis.

    ``fits`` pairs each fitted vector index with its GpdFit; aggregates
    use converged fits only. ``skipped`` records (index, reason) for
    vectors that could not be fit.
    """

    per_vector_k: np.ndarray
    fits: tuple[tuple[int, GpdFit], ...]
    skipped: tuple[tuple[int, str], ...]
    mean_k: float
    median_k: float
    axis: str
    normalized: bool
    tail_fraction: float

    def to_json(self) -> dict:
        return {
            "axis": self.axis,
            "normalized": self.normalized,
            "tail_fraction": self.tail_fraction,
            "n_fitted": len(self.fits),
            "mean_k": self.mean_k,
            "median_k": self.median_k,
            "fits": [fit.to_json(idx) for idx, fit in self.fits],
            "skipped": [{"axis_index": i, "reason": r} for i, r in self.skipped],
        }

    def histogram_rows(self, bins: int = 30):
        counts, edges = np.histogram(self.per_vector_k, bins=bins)
        rows = [["bin_left", "bin_right", "count"]]
        for i, c in enumerate(counts):
            rows.append([repr(float(edges[i])), repr(float(edges[i + 1])), int(c)])
        return rows


def tail_summary(
    m: ResponseMatrix,
    axis: str = AXIS_NEURON,
    normalized: bool = False,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
    min_count: int = DEFAULT_MIN_EXCEEDANCES,
    max_restarts: int = DEFAULT_MAX_RESTARTS,
    seed: int = 0,
) -> TailSummary:
    """One GPD tail fit per column (axis='neuron') or row (axis='image').

    Vectors that fail the exceedance preconditions, degenerate, or do not
    converge are skipped and reported. Raises if nothing converged.
    """
    if axis not in (AXIS_NEURON, AXIS_IMAGE):
        raise BoundsError(f"axis must be 'neuron' or 'image', got {axis!r}")
    if normalized:
        m = normalize_per_neuron(m)
    vectors = m.values.T if axis == AXIS_NEURON else m.values
    axis_code = 1 if axis == AXIS_NEURON else 2

    fits = []
    skipped = []
    for idx in range(vectors.shape[0]):
        try:
            theta, exc = select_exceedances(vectors[idx], tail_fraction, min_count)
            fit = fit_gpd(
                exc,
                theta,
                min_count=min_count,
                max_restarts=max_restarts,
                seed=derive_seed(seed, axis_code, idx),
            )
        except (DegenerateDataError, InsufficientDataError) as exc_err:
            skipped.append((idx, str(exc_err)))
            continue
        if fit.converged:
            fits.append((idx, fit))
        else:
            skipped.append((idx, "non-converged after restart budget"))
    if not fits:
        raise DegenerateDataError(f"no vector produced a converged tail fit along {axis}")
    ks = np.array([fit.k for _, fit in fits])
    return TailSummary(
        per_vector_k=ks,
        fits=tuple(fits),
        skipped=tuple(skipped),
        mean_k=float(ks.mean()),
        median_k=float(np.median(ks)),
        axis=axis,
        normalized=normalized,
        tail_fraction=tail_fraction,
    )
