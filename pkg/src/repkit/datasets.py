"""Synthetic datasets and the CSV dataset format.

CSV files have a header row. Input columns are prefixed ``x_``, outputs or
labels ``y_`` and per-sample output covariance entries ``cov_a_b``. Floats
are written with ``repr`` so a read after write is bit-exact.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .learners import Dataset

__all__ = ["blobs3", "sinusoid_gp", "sparse_features", "to_csv", "from_csv", "write_csv", "read_csv",
           "read_inputs", "table_csv", "CsvError", "BLOB_CENTERS"]

BLOB_CENTERS = np.array([[0.0, 3.0], [2.6, -1.5], [-2.6, -1.5]])


class CsvError(ValueError):
    """Malformed dataset file; the message names the offending line."""


def blobs3(per_class: int = 20, seed: int = 42, spread: float = 0.6) -> Dataset:
    """Three Gaussian clusters in the plane with one-hot labels, grouped by class."""
    if per_class < 1:
        raise ValueError("per_class must be >= 1")
    rng = np.random.default_rng(seed)
    X = np.vstack([c + spread * rng.standard_normal((per_class, 2)) for c in BLOB_CENTERS])
    return Dataset.from_labels(X, np.repeat(np.arange(3), per_class), 3)


def sinusoid_gp(m: int = 12, seed: int = 42, noise: float = 0.1) -> Dataset:
    """1-D inputs with noisy 2-D sinusoidal outputs and per-sample output covariances."""
    rng = np.random.default_rng(seed)
    x = np.sort(rng.uniform(-3.0, 3.0, m))
    Y = np.column_stack([np.sin(x), np.cos(x)]) + noise * rng.standard_normal((m, 2))
    cov = []
    for _ in range(m):
        A = 0.1 * rng.standard_normal((2, 2))
        cov.append(A @ A.T)
    return Dataset(x[:, None], Y, np.array(cov))


def sparse_features(m: int = 30, n_features: int = 8, dead=(2, 5), seed: int = 42,
                    noise: float = 0.01) -> Dataset:
    """Linear-in-features data whose listed feature columns are identically zero."""
    rng = np.random.default_rng(seed)
    dead = sorted(set(int(j) for j in dead))
    if any(not 0 <= j < n_features for j in dead):
        raise ValueError("dead feature index out of range")
    X = rng.standard_normal((m, n_features))
    X[:, dead] = 0.0
    w = rng.standard_normal(n_features)
    w[rng.random(n_features) < 0.3] = 0.0
    y = X @ w + noise * rng.standard_normal(m)
    return Dataset(X, y[:, None])


# -- CSV -----------------------------------------------------------------------------

def to_csv(data: Dataset) -> str:
    n = data.n
    header = [f"x_{j}" for j in range(data.d)] + [f"y_{j}" for j in range(n)]
    if data.cov is not None:
        header += [f"cov_{a}_{b}" for a in range(n) for b in range(n)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for i in range(data.m):
        row = list(data.X[i]) + list(data.Y[i])
        if data.cov is not None:
            row += list(data.cov[i].ravel())
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def from_csv(text: str) -> Dataset:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise CsvError("line 1: empty file")
    header = [h.strip() for h in rows[0]]
    xs = [i for i, h in enumerate(header) if h.startswith("x_")]
    ys = [i for i, h in enumerate(header) if h.startswith("y_")]
    cs = [i for i, h in enumerate(header) if h.startswith("cov_")]
    unknown = [h for h in header if not h.startswith(("x_", "y_", "cov_"))]
    if unknown:
        raise CsvError(f"line 1: unknown column(s) {unknown}")
    if not xs or not ys:
        raise CsvError("line 1: need at least one x_ and one y_ column")
    if cs and len(cs) != len(ys) ** 2:
        raise CsvError(f"line 1: expected {len(ys) ** 2} cov_ columns, found {len(cs)}")
    vals = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise CsvError(f"line {lineno}: expected {len(header)} fields, found {len(row)}")
        try:
            vals.append([float(v) for v in row])
        except ValueError as exc:
            raise CsvError(f"line {lineno}: {exc}") from None
    if not vals:
        raise CsvError("line 2: no data rows")
    V = np.array(vals)
    n = len(ys)
    cov = V[:, cs].reshape(-1, n, n) if cs else None
    try:
        return Dataset(V[:, xs], V[:, ys], cov)
    except ValueError as exc:
        raise CsvError(f"line 2: {exc}") from None


def write_csv(data: Dataset, path) -> None:
    Path(path).write_text(to_csv(data))


def read_csv(path) -> Dataset:
    return from_csv(Path(path).read_text())


def read_inputs(path) -> np.ndarray:
    """Only the ``x_`` columns of a CSV file; other columns are ignored."""
    rows = list(csv.reader(io.StringIO(Path(path).read_text())))
    if not rows:
        raise CsvError("line 1: empty file")
    xs = [i for i, h in enumerate(rows[0]) if h.strip().startswith("x_")]
    if not xs:
        raise CsvError("line 1: no x_ columns")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(rows[0]):
            raise CsvError(f"line {lineno}: expected {len(rows[0])} fields, found {len(row)}")
        try:
            out.append([float(row[i]) for i in xs])
        except ValueError as exc:
            raise CsvError(f"line {lineno}: {exc}") from None
    if not out:
        raise CsvError("line 2: no data rows")
    return np.array(out)


def table_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()
