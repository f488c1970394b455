"""Statistics toolkit for stimulus x neuron response matrices.

Measures single-neuron selectivity and population sparseness by excess
kurtosis, upper-tail heaviness by generalized-Pareto tail index, and the
intrinsic dimensionality of the represented stimulus space by PCA
against a reshuffled null, with asymptotic extrapolation over dataset
size. Hot kernels run from a compiled extension when available, with a
pure-numpy fallback selected at import (see ``respstats._kernels``).
"""

from ._kernels import BACKEND as kernel_backend
from .asymptote import (
    AsymptoticModelParams,
    CurveFit,
    ExtrapolationResult,
    FitConfig,
    eval_model,
    extrapolate_surface,
    fit_curve,
)
from .dimensionality import (
    EigenSpectrum,
    IdEstimate,
    IdSurface,
    eigen_spectrum,
    estimate_id,
    id_surface,
    variance_explained,
)
from .errors import (
    BoundsError,
    ConvergenceError,
    DataFormatError,
    DegenerateDataError,
    InsufficientDataError,
    RespstatsError,
)
from .gpd import GpdFit, TailSummary, fit_gpd, gpd_pdf, gpd_quantile, select_exceedances, tail_summary
from .kurtosis import (
    KurtosisGrid,
    KurtosisSummary,
    excess_kurtosis,
    kurtosis_grid,
    selectivity_kurtosis,
    sparseness_kurtosis,
)
from .matrix import (
    ResponseMatrix,
    SubsampleSpec,
    load_matrix,
    normalize_per_neuron,
    remove_dead_neurons,
    save_matrix,
    shuffle_within_columns,
    subsample,
)
from .synthetic import SyntheticSpec, analytic_truth, generate

__version__ = "0.1.0"

__all__ = [
    "AsymptoticModelParams",
    "BoundsError",
    "ConvergenceError",
    "CurveFit",
    "DataFormatError",
    "DegenerateDataError",
    "EigenSpectrum",
    "ExtrapolationResult",
    "FitConfig",
    "GpdFit",
    "IdEstimate",
    "IdSurface",
    "InsufficientDataError",
    "KurtosisGrid",
    "KurtosisSummary",
    "ResponseMatrix",
    "RespstatsError",
    "SubsampleSpec",
    "SyntheticSpec",
    "TailSummary",
    "analytic_truth",
    "eigen_spectrum",
    "estimate_id",
    "eval_model",
    "excess_kurtosis",
    "extrapolate_surface",
    "fit_curve",
    "fit_gpd",
    "generate",
    "gpd_pdf",
    "gpd_quantile",
    "id_surface",
    "kernel_backend",
    "kurtosis_grid",
    "load_matrix",
    "normalize_per_neuron",
    "remove_dead_neurons",
    "save_matrix",
    "select_exceedances",
    "selectivity_kurtosis",
    "shuffle_within_columns",
    "sparseness_kurtosis",
    "subsample",
    "tail_summary",
    "variance_explained",
]
