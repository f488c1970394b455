"""Layer-activation dumps from pretrained classifiers into NRSM matrices."""

from .extract import ExtractionSpec, extract
from .models import ToyNet, available_layers, resolve_model
from .nrsm import write_matrix

__version__ = "0.1.0"

__all__ = [
    "ExtractionSpec",
    "ToyNet",
    "available_layers",
    "extract",
    "resolve_model",
    "write_matrix",
]
