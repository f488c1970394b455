"""Batch activation export.

Runs every decodable image in a folder (sorted by filename, which fixes
the matrix row order) through a model in inference mode and writes one
stimuli x units NRSM matrix per requested layer, units flattened, plus a
JSON sidecar recording model, layer, shape, row filenames, skipped files
and the preprocessing constants.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from PIL import Image, UnidentifiedImageError

from .models import available_layers, resolve_model
from .nrsm import write_matrix

# standard ImageNet channel statistics; recorded in every sidecar
CHANNEL_MEAN = (0.485, 0.456, 0.406)
CHANNEL_STD = (0.229, 0.224, 0.225)

IMAGE_SUFFIXES = {".png", ".jpg", ".jpeg", ".bmp", ".gif", ".tif", ".tiff", ".webp"}


@dataclass(frozen=True)
class ExtractionSpec:
    model: str
    layers: tuple[str, ...]
    image_dir: Path
    out_prefix: str
    resize: tuple[int, int] = (224, 224)
    weights: str | None = None
    batch_size: int = 8

    def __post_init__(self):
        object.__setattr__(self, "image_dir", Path(self.image_dir))
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ValueError("at least one layer name is required")


def _load_image(path: Path, resize: tuple[int, int]) -> np.ndarray:
    with Image.open(path) as img:
        img = img.convert("RGB").resize(resize, Image.BILINEAR)
        arr = np.asarray(img, dtype=np.float32) / 255.0
    arr = (arr - np.array(CHANNEL_MEAN, dtype=np.float32)) / np.array(CHANNEL_STD, dtype=np.float32)
    return arr.transpose(2, 0, 1)  # HWC -> CHW


def _sanitize(layer: str) -> str:
    return layer.replace(".", "-").replace("/", "-")


def extract(spec: ExtractionSpec) -> dict[str, Path]:
    """Write one matrix file per layer; returns {layer: matrix path}."""
    if not spec.image_dir.is_dir():
        raise FileNotFoundError(f"image folder {spec.image_dir} does not exist")
    candidates = sorted(
        p for p in spec.image_dir.iterdir()
        if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )
    if not candidates:
        raise ValueError(f"no image files in {spec.image_dir}")

    model = resolve_model(spec.model, spec.weights)
    modules = dict(model.named_modules())
    missing = [layer for layer in spec.layers if layer not in modules]
    if missing:
        raise ValueError(
            f"layer(s) {missing} not found in {spec.model}; available: {available_layers(model)}"
        )

    rows: list[str] = []
    skipped: list[str] = []
    batches: list[np.ndarray] = []
    for path in candidates:
        try:
            batches.append(_load_image(path, spec.resize))
        except (UnidentifiedImageError, OSError) as exc:
            warnings.warn(f"skipping undecodable image {path.name}: {exc}")
            skipped.append(path.name)
            continue
        rows.append(path.name)
    if not rows:
        raise ValueError(f"no decodable images in {spec.image_dir}")

    captured: dict[str, list[np.ndarray]] = {layer: [] for layer in spec.layers}
    hooks = []
    try:
        for layer in spec.layers:
            def grab(_module, _inputs, output, layer=layer):
                out = output.detach().to(torch.float64).reshape(output.shape[0], -1)
                captured[layer].append(out.numpy())

            hooks.append(modules[layer].register_forward_hook(grab))
        with torch.no_grad():
            for start in range(0, len(batches), spec.batch_size):
                chunk = np.stack(batches[start:start + spec.batch_size])
                model(torch.from_numpy(chunk))
    finally:
        for hook in hooks:
            hook.remove()

    out_paths: dict[str, Path] = {}
    Path(spec.out_prefix).parent.mkdir(parents=True, exist_ok=True)
    for layer in spec.layers:
        values = np.concatenate(captured[layer], axis=0)
        base = Path(f"{spec.out_prefix}_{_sanitize(layer)}")
        matrix_path = base.with_suffix(".nrsm")
        write_matrix(values, matrix_path)
        sidecar = {
            "model": spec.model,
            "layer": layer,
            "shape": list(values.shape),
            "rows": rows,
            "skipped": skipped,
            "preprocessing": {
                "resize": list(spec.resize),
                "channel_mean": list(CHANNEL_MEAN),
                "channel_std": list(CHANNEL_STD),
            },
        }
        base.with_suffix(".json").write_text(
            json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        out_paths[layer] = matrix_path
    return out_paths
