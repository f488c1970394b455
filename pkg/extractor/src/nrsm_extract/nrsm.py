"""NRSM binary matrix writer.

Layout (little-endian, no padding): magic ``NRSM``, u32 version (= 1),
u64 rows, u64 cols, then rows*cols IEEE-754 binary64 values, row-major.
Files are written to a temp path and renamed so readers never see a
partial matrix.
"""

from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

MAGIC = b"NRSM"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


def write_matrix(values: np.ndarray, path) -> Path:
    values = np.ascontiguousarray(values, dtype="<f8")
    if values.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {values.shape}")
    if not np.isfinite(values).all():
        raise ValueError("matrix contains non-finite values")
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, values.shape[0], values.shape[1]))
        fh.write(values.tobytes())
    os.replace(tmp, path)
    return path
