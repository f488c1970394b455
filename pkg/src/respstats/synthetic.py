"""Ground-truth generators for estimator validation.

Each kind has an analytically known statistic, so every estimator in the
toolkit can be checked against an independent truth without any recorded
data. Randomness comes from numpy's PCG64 generator seeded explicitly;
the contract across runs is the analytic property, with bitwise
reproducibility on a fixed numpy version.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BoundsError
from .gpd import gpd_quantile
from .matrix import ResponseMatrix
from .randomness import derive_rng

KINDS = ("iid_normal", "iid_exponential", "iid_laplace", "gpd_tail", "planted_rank")

# analytic excess kurtosis of the iid kinds
_IID_KURTOSIS = {"iid_normal": 0.0, "iid_exponential": 6.0, "iid_laplace": 3.0}


@dataclass(frozen=True)
class SyntheticSpec:
    kind: str
    shape: tuple[int, int]
    seed: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise BoundsError(f"unknown synthetic kind {self.kind!r}; choose from {KINDS}")
        s, n = self.shape
        if s < 1 or n < 1:
            raise BoundsError(f"shape must be positive, got {self.shape}")
        if self.kind == "gpd_tail":
            if self.params.get("sigma", 1.0) <= 0:
                raise BoundsError("gpd_tail sigma must be > 0")
        if self.kind == "planted_rank":
            rank = int(self.params.get("rank", 1))
            if not 1 <= rank <= min(s, n):
                raise BoundsError(f"rank {rank} outside [1, {min(s, n)}]")
            if self.params.get("noise", 0.0) < 0:
                raise BoundsError("noise amplitude must be >= 0")


def generate(spec: SyntheticSpec) -> ResponseMatrix:
    """Draw one matrix for ``spec``; deterministic under its seed."""
    rng = derive_rng(spec.seed)
    s, n = spec.shape
    if spec.kind == "iid_normal":
        values = rng.standard_normal((s, n))
    elif spec.kind == "iid_exponential":
        values = rng.standard_exponential((s, n)) * spec.params.get("scale", 1.0)
    elif spec.kind == "iid_laplace":
        values = rng.laplace(0.0, spec.params.get("scale", 1.0), (s, n))
    elif spec.kind == "gpd_tail":
        k = spec.params.get("k", 0.0)
        sigma = spec.params.get("sigma", 1.0)
        theta = spec.params.get("theta", 0.0)
        values = gpd_quantile(rng.random((s, n)), k, sigma, theta)
    elif spec.kind == "planted_rank":
        values = _planted_rank(rng, s, n, int(spec.params.get("rank", 1)), spec.params.get("noise", 0.0))
    else:  # pragma: no cover - guarded in __post_init__
        raise BoundsError(spec.kind)
    return ResponseMatrix(values)


def _planted_rank(rng, s, n, rank, noise):
    # Equal-power planted components: Gaussian factors orthonormalized so
    # every planted direction carries the same variance, then the whole
    # signal rescaled to unit standard deviation. Noise amplitude is
    # relative to that unit signal scale.
    u = rng.standard_normal((s, rank))
    v = rng.standard_normal((n, rank))
    qu, _ = np.linalg.qr(u)
    qv, _ = np.linalg.qr(v)
    signal = qu @ qv.T
    std = signal.std()
    if std == 0.0:  # pragma: no cover - QR of Gaussians is never rank-deficient
        raise BoundsError("degenerate planted signal")
    signal = signal / std
    if noise > 0.0:
        signal = signal + noise * rng.standard_normal((s, n))
    return signal


def analytic_truth(spec: SyntheticSpec) -> dict:
    """The known quantities tests compare against, keyed by statistic."""
    if spec.kind in _IID_KURTOSIS:
        return {"excess_kurtosis": _IID_KURTOSIS[spec.kind]}
    if spec.kind == "gpd_tail":
        return {
            "tail_index": spec.params.get("k", 0.0),
            "sigma": spec.params.get("sigma", 1.0),
            "theta": spec.params.get("theta", 0.0),
        }
    if spec.kind == "planted_rank":
        return {"dimensionality": int(spec.params.get("rank", 1))}
    raise BoundsError(spec.kind)  # pragma: no cover
