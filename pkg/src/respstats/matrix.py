"""Response-matrix data model, serialization and core transforms.

A response matrix is a stimuli x neurons grid: each row holds the
population response to one stimulus, each column one neuron's responses
across all stimuli. Matrices are immutable after construction and every
operation here is a pure function, so instances can be shared freely
across threads.

Two on-disk formats are supported:

* CSV: comma-separated, UTF-8, one stimulus per row, with an optional
  single header row (detected by a non-numeric first row).
* NRSM binary (bit-exact round trip): magic ``NRSM``, version as u32
  little-endian (=1), rows and cols as u64 little-endian, then rows*cols
  IEEE-754 binary64 values, little-endian, row-major, no padding.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BoundsError, DataFormatError, DegenerateDataError
from .randomness import derive_rng

MAGIC = b"NRSM"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


@dataclass(frozen=True)
class ResponseMatrix:
    """Immutable stimuli x neurons matrix of finite response magnitudes."""

    values: np.ndarray
    row_labels: tuple[str, ...] | None = None
    col_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, order="C", copy=True)
        if values.ndim != 2:
            raise DataFormatError(f"expected a 2-D matrix, got {values.ndim} dimension(s)")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise DataFormatError(f"matrix must be at least 1x1, got {values.shape}")
        bad = ~np.isfinite(values)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise DataFormatError(
                f"non-finite value {values[i, j]} at row {i + 1}, column {j + 1}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        for name, labels, size in (
            ("row_labels", self.row_labels, values.shape[0]),
            ("col_labels", self.col_labels, values.shape[1]),
        ):
            if labels is not None:
                labels = tuple(str(x) for x in labels)
                if len(labels) != size:
                    raise DataFormatError(f"{name} has {len(labels)} entries, expected {size}")
                object.__setattr__(self, name, labels)

    @property
    def n_stimuli(self) -> int:
        return self.values.shape[0]

    @property
    def n_neurons(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def column(self, j: int) -> np.ndarray:
        """Responses of neuron ``j`` to every stimulus."""
        return self.values[:, j]

    def row(self, i: int) -> np.ndarray:
        """Population response to stimulus ``i``."""
        return self.values[i, :]

    def __eq__(self, other):
        if not isinstance(other, ResponseMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.values, other.values)
            and self.row_labels == other.row_labels
            and self.col_labels == other.col_labels
        )


@dataclass(frozen=True)
class SubsampleSpec:
    """Deterministic row/column subsample request."""

    n_rows: int
    n_cols: int
    seed: int
    repeat_index: int = 0


def load_matrix(path, format: str | None = None) -> ResponseMatrix:
    """Read a matrix from ``path``; ``format`` is 'csv', 'binary' or None
    to sniff the binary magic bytes."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    if format is None:
        format = "binary" if raw[:4] == MAGIC else "csv"
    if format == "binary":
        return _parse_binary(raw, path)
    if format == "csv":
        return _parse_csv(raw, path)
    raise DataFormatError(f"unknown format {format!r} (expected 'csv' or 'binary')")


def save_matrix(m: ResponseMatrix, path, format: str = "binary") -> None:
    """Write ``m`` to ``path``. Binary round-trips bit-exactly; CSV keeps
    17 significant digits (enough to reproduce every float64)."""
    path = Path(path)
    try:
        if format == "binary":
            with open(path, "wb") as fh:
                fh.write(_HEADER.pack(MAGIC, VERSION, m.n_stimuli, m.n_neurons))
                fh.write(np.ascontiguousarray(m.values, dtype="<f8").tobytes())
        elif format == "csv":
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                if m.col_labels is not None:
                    writer.writerow(m.col_labels)
                for row in m.values:
                    writer.writerow(f"{v:.17g}" for v in row)
        else:
            raise DataFormatError(f"unknown format {format!r} (expected 'csv' or 'binary')")
    except OSError as exc:
        raise DataFormatError(f"cannot write {path}: {exc}") from exc


def _parse_binary(raw: bytes, path) -> ResponseMatrix:
    if len(raw) < _HEADER.size:
        raise DataFormatError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, rows, cols = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise DataFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise DataFormatError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 8 * rows * cols
    if len(raw) != expected:
        raise DataFormatError(f"{path}: expected {expected} bytes for {rows}x{cols}, got {len(raw)}")
    values = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size).reshape(rows, cols)
    bad = ~np.isfinite(values)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise DataFormatError(f"{path}: non-finite value at row {i + 1}, column {j + 1}")
    return ResponseMatrix(values)


def _parse_csv(raw: bytes, path) -> ResponseMatrix:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DataFormatError(f"{path}: not valid UTF-8 ({exc})") from exc
    rows = [row for row in csv.reader(text.splitlines()) if row]
    if not rows:
        raise DataFormatError(f"{path}: empty file")

    col_labels = None
    start = 0
    try:
        [float(cell) for cell in rows[0]]
    except ValueError:
        col_labels = tuple(cell.strip() for cell in rows[0])
        start = 1
    if start == len(rows):
        raise DataFormatError(f"{path}: header but no data rows")

    n_cols = len(rows[start])
    data = np.empty((len(rows) - start, n_cols))
    for i, row in enumerate(rows[start:], start=start):
        if len(row) != n_cols:
            raise DataFormatError(
                f"{path}: ragged row {i + 1} has {len(row)} cells, expected {n_cols}"
            )
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError as exc:
                raise DataFormatError(
                    f"{path}: non-numeric cell {cell!r} at row {i + 1}, column {j + 1}"
                ) from exc
            if not np.isfinite(v):
                raise DataFormatError(
                    f"{path}: non-finite value {cell!r} at row {i + 1}, column {j + 1}"
                )
            data[i - start, j] = v
    return ResponseMatrix(data, col_labels=col_labels)


def _column_name(m: ResponseMatrix, j: int) -> str:
    if m.col_labels is not None:
        return f"{j} ({m.col_labels[j]})"
    return str(j)


def normalize_per_neuron(m: ResponseMatrix) -> ResponseMatrix:
    """Divide each column by its mean response across all stimuli.

    Every output column then has mean 1. Columns with zero mean are
    rejected; run :func:`remove_dead_neurons` first for data with silent
    units.
    """
    means = m.values.mean(axis=0)
    zero = np.flatnonzero(means == 0.0)
    if zero.size:
        raise DegenerateDataError(
            f"cannot normalize: column {_column_name(m, zero[0])} has zero mean response"
        )
    out = m.values / means
    if not np.isfinite(out).all():
        j = int(np.argwhere(~np.isfinite(out))[0][1])
        raise DegenerateDataError(
            f"cannot normalize: column {_column_name(m, j)} mean {means[j]} underflows"
        )
    return ResponseMatrix(out, row_labels=m.row_labels, col_labels=m.col_labels)


def remove_dead_neurons(
    m: ResponseMatrix, tol: float = 0.0
) -> tuple[ResponseMatrix, list[int]]:
    """Drop columns that do not respond to any stimulus.

    A column is dead when every |value| <= ``tol`` (default: exactly
    zero). Returns the filtered matrix and the removed column indices;
    surviving column order is preserved.
    """
    dead = np.all(np.abs(m.values) <= tol, axis=0)
    removed = [int(j) for j in np.flatnonzero(dead)]
    if len(removed) == m.n_neurons:
        raise DegenerateDataError("all columns are dead; empty matrix disallowed")
    if not removed:
        return m, []
    keep = ~dead
    col_labels = None
    if m.col_labels is not None:
        col_labels = tuple(lbl for lbl, k in zip(m.col_labels, keep) if k)
    return ResponseMatrix(m.values[:, keep], row_labels=m.row_labels, col_labels=col_labels), removed


def subsample(m: ResponseMatrix, spec: SubsampleSpec) -> ResponseMatrix:
    """Uniform row/column subsample without replacement.

    The drawn index sets are kept in ascending order, so a full-size spec
    reproduces the input exactly. Deterministic in (seed, repeat_index).
    """
    if not (1 <= spec.n_rows <= m.n_stimuli):
        raise BoundsError(f"n_rows={spec.n_rows} outside [1, {m.n_stimuli}]")
    if not (1 <= spec.n_cols <= m.n_neurons):
        raise BoundsError(f"n_cols={spec.n_cols} outside [1, {m.n_neurons}]")
    rng = derive_rng(spec.seed, spec.repeat_index)
    rows = np.sort(rng.choice(m.n_stimuli, size=spec.n_rows, replace=False))
    cols = np.sort(rng.choice(m.n_neurons, size=spec.n_cols, replace=False))
    row_labels = tuple(m.row_labels[i] for i in rows) if m.row_labels is not None else None
    col_labels = tuple(m.col_labels[j] for j in cols) if m.col_labels is not None else None
    return ResponseMatrix(m.values[np.ix_(rows, cols)], row_labels=row_labels, col_labels=col_labels)


def shuffle_within_columns(
    m: ResponseMatrix, seed: int, scope: str = "columns"
) -> ResponseMatrix:
    """Reshuffled null model: permute responses independently per column.

    Destroys inter-neuron correlations while preserving each neuron's
    marginal value multiset. ``scope='matrix'`` instead permutes the whole
    grid (sensitivity-check variant). Row labels are dropped because rows
    no longer correspond to stimuli.
    """
    rng = derive_rng(seed)
    if scope == "columns":
        shuffled = rng.permuted(m.values, axis=0)
    elif scope == "matrix":
        shuffled = rng.permutation(m.values.ravel()).reshape(m.shape)
    else:
        raise BoundsError(f"unknown shuffle scope {scope!r}")
    return ResponseMatrix(shuffled, col_labels=m.col_labels)
