"""Kernel backend selection.

The compiled extension is preferred when present; ``RESPSTATS_PURE=1``
forces the pure-numpy fallback (used in tests and benchmarks).
"""

import importlib
import os

from . import pure

_fast = None
if os.environ.get("RESPSTATS_PURE", "") in ("", "0"):
    try:
        _fast = importlib.import_module(__name__ + "._fast")
    except ImportError:
        _fast = None

HAVE_EXT = _fast is not None
BACKEND = "cython" if HAVE_EXT else "pure"

if HAVE_EXT:
    column_kurtosis = _fast.column_kurtosis
    gpd_nll = _fast.gpd_nll
    model_values = _fast.model_values
    lm_fit_log = _fast.lm_fit_log
else:
    column_kurtosis = pure.column_kurtosis
    gpd_nll = pure.gpd_nll
    model_values = pure.model_values
    lm_fit_log = pure.lm_fit_log

__all__ = [
    "BACKEND",
    "HAVE_EXT",
    "column_kurtosis",
    "gpd_nll",
    "lm_fit_log",
    "model_values",
    "pure",
]
