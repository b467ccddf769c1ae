"""Loading, saving, and synthesis of dense sample matrices.

Conventions: rows are samples, columns are features. Two on-disk formats
are supported:

* ``csv`` — comma-separated numeric cells, ``.`` decimal point, no header.
* ``raw-binary`` — two little-endian uint64 dimensions (rows, cols)
  followed by row-major little-endian float64 values.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_BINARY_HEADER = struct.Struct("<QQ")

FORMATS = ("csv", "raw-binary")


@dataclass(frozen=True)
class DataMatrix:
    """Dense n-by-d sample matrix with finite float64 entries.

    The underlying array is copied and marked read-only, so instances are
    safe to share across threads and worker processes.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64, copy=True)
        if values.ndim != 2:
            raise ValueError(f"expected a 2-d sample matrix, got shape {values.shape}")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"matrix must be at least 1x1, got {values.shape}")
        bad = ~np.isfinite(values)
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise ValueError(f"non-finite entry at row {i}, column {j}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters for a union-of-subspaces sample generator.

    k subspaces of dimension r in ambient dimension d, n_per samples each,
    isotropic Gaussian noise of scale sigma, fully determined by seed.
    """

    k: int
    n_per: int
    d: int
    r: int
    sigma: float
    seed: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("need at least one subspace")
        if self.n_per < 1:
            raise ValueError("need at least one sample per subspace")
        if not 1 <= self.r < self.d:
            raise ValueError(f"subspace dimension must satisfy 1 <= r < d, got r={self.r}, d={self.d}")
        if self.sigma < 0:
            raise ValueError("noise scale sigma must be nonnegative")

    @property
    def n(self) -> int:
        return self.k * self.n_per


def load_dense_matrix(path, format: str = "csv") -> DataMatrix:
    """Load a dense sample matrix from ``path``.

    Parameters
    ----------
    path : str or Path
    format : {"csv", "raw-binary"}

    Raises
    ------
    FileNotFoundError
        If the file does not exist.
    ValueError
        On ragged rows, non-numeric cells, empty files, or truncated
        binary payloads; messages carry the offending row/column.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such data file: {path}")
    if format == "csv":
        values = _read_csv(path)
    elif format == "raw-binary":
        values = _read_binary(path)
    else:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    return DataMatrix(values)


def save_dense_matrix(values, path, format: str = "raw-binary") -> None:
    """Write a matrix to ``path`` in one of the supported formats.

    csv cells use ``repr`` formatting, so a csv round trip preserves
    float64 values exactly; raw-binary round trips bit-for-bit.
    """
    values = np.ascontiguousarray(getattr(values, "values", values), dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {values.shape}")
    path = Path(path)
    if format == "csv":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for row in values:
                fh.write(",".join(repr(float(v)) for v in row))
                fh.write("\n")
    elif format == "raw-binary":
        n, d = values.shape
        with open(path, "wb") as fh:
            fh.write(_BINARY_HEADER.pack(n, d))
            fh.write(values.astype("<f8").tobytes())
    else:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")


def load_labels(path) -> np.ndarray:
    """Load integer cluster labels, one per line."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such label file: {path}")
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(line))
            except ValueError:
                raise ValueError(f"{path}: non-integer label at line {lineno}: {line!r}") from None
    if not labels:
        raise ValueError(f"{path}: file contains no labels")
    out = np.asarray(labels, dtype=np.int64)
    if (out < 0).any():
        raise ValueError(f"{path}: labels must be nonnegative")
    return out


def normalize_pixel_range(X: DataMatrix) -> DataMatrix:
    """Divide every entry by 255 so pixel data in [0, 255] maps into [0, 1]."""
    return DataMatrix(X.values / 255.0)


def generate_union_of_subspaces(spec: SyntheticSpec) -> tuple[DataMatrix, np.ndarray]:
    """Draw samples from k random r-dimensional subspaces of R^d.

    Each subspace gets an orthonormal basis (QR of a seeded Gaussian
    draw); samples are basis combinations with standard-normal weights
    plus ``sigma`` times isotropic Gaussian noise. Returns the stacked
    sample matrix and the generating-subspace label of each row.
    Identical specs produce bit-identical output.
    """
    rng = np.random.default_rng(spec.seed)
    blocks = []
    for _ in range(spec.k):
        basis, _ = np.linalg.qr(rng.standard_normal((spec.d, spec.r)))
        weights = rng.standard_normal((spec.n_per, spec.r))
        noise = rng.standard_normal((spec.n_per, spec.d))
        blocks.append(weights @ basis.T + spec.sigma * noise)
    labels = np.repeat(np.arange(spec.k, dtype=np.int64), spec.n_per)
    return DataMatrix(np.vstack(blocks)), labels


def _read_csv(path: Path) -> np.ndarray:
    rows = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if width is None:
                width = len(cells)
            elif len(cells) != width:
                raise ValueError(
                    f"{path}: ragged row {lineno} has {len(cells)} cells, expected {width}"
                )
            parsed = []
            for colno, cell in enumerate(cells, start=1):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise ValueError(
                        f"{path}: non-numeric cell at row {lineno}, column {colno}: {cell.strip()!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise ValueError(f"{path}: file contains no data")
    return np.asarray(rows, dtype=np.float64)


def _read_binary(path: Path) -> np.ndarray:
    raw = path.read_bytes()
    if len(raw) == 0:
        raise ValueError(f"{path}: file contains no data")
    if len(raw) < _BINARY_HEADER.size:
        raise ValueError(f"{path}: truncated header ({len(raw)} bytes)")
    n, d = _BINARY_HEADER.unpack_from(raw)
    if n < 1 or d < 1:
        raise ValueError(f"{path}: invalid dimensions {n}x{d} in header")
    expected = _BINARY_HEADER.size + 8 * n * d
    if len(raw) != expected:
        raise ValueError(
            f"{path}: expected {expected} bytes for a {n}x{d} matrix, found {len(raw)}"
        )
    values = np.frombuffer(raw, dtype="<f8", offset=_BINARY_HEADER.size)
    return values.reshape(n, d).astype(np.float64, copy=True)
