"""Shared geometry, data containers and file formats.

Every distance in this package is the dimension-scaled Euclidean norm
sqrt(mean((a - b)**2)), so risk values stay comparable across dimensions.
Assignment ties always break to the lowest cluster index, which keeps runs
reproducible bit for bit.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = [
    "normalized_norm",
    "normalized_distances",
    "nearest_center",
    "assign_nearest",
    "Dataset",
    "FitReport",
    "read_csv",
    "write_csv",
    "write_model",
    "read_model",
]


def normalized_norm(z) -> float:
    """Dimension-scaled Euclidean norm sqrt(mean(z**2)) of a vector."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 1 or z.size == 0:
        raise ValueError("normalized_norm expects a non-empty 1-d vector")
    if not np.all(np.isfinite(z)):
        raise ValueError("normalized_norm: non-finite input")
    return float(np.sqrt(np.mean(z * z)))


def _check_centers(centers) -> np.ndarray:
    c = np.asarray(centers, dtype=float)
    if c.ndim != 2 or c.shape[0] < 1 or c.shape[1] < 1:
        raise ValueError("centers must be a (k, d) array with k >= 1, d >= 1")
    if not np.all(np.isfinite(c)):
        raise ValueError("centers contain non-finite values")
    return c


def normalized_distances(X, centers) -> np.ndarray:
    """Matrix of scaled distances between rows of X and each center, shape (n, k).

    Loops over centers rather than broadcasting an (n, k, d) block so large
    inputs (n ~ 5e3, d ~ 1.5e3) stay within a modest memory footprint.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be a 2-d array")
    C = _check_centers(centers)
    if X.shape[1] != C.shape[1]:
        raise ValueError(
            f"dimension mismatch: data has d={X.shape[1]}, centers have d={C.shape[1]}"
        )
    out = np.empty((X.shape[0], C.shape[0]))
    for r in range(C.shape[0]):
        diff = X - C[r]
        out[:, r] = np.sqrt((diff * diff).mean(axis=1))
    return out


def nearest_center(z, centers) -> int:
    """Index of the center closest to z; ties break to the lowest index."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 1:
        raise ValueError("z must be a 1-d vector")
    C = _check_centers(centers)
    if z.size != C.shape[1]:
        raise ValueError(f"dimension mismatch: z has d={z.size}, centers have d={C.shape[1]}")
    if not np.all(np.isfinite(z)):
        raise ValueError("nearest_center: non-finite input")
    diff = C - z
    return int(np.argmin((diff * diff).sum(axis=1)))


def assign_nearest(X, centers) -> np.ndarray:
    """Nearest-center index for every row of X."""
    return normalized_distances(X, centers).argmin(axis=1)


@dataclass
class Dataset:
    """A fixed sample: rows X (n, d) with optional integer labels and outlier flags.

    Labels mark the generating component; outlier flags mark contaminated rows.
    Arrays are made read-only on construction, observations never mutate.
    """

    X: np.ndarray
    labels: Optional[np.ndarray] = None
    outlier_flags: Optional[np.ndarray] = None

    def __post_init__(self):
        X = np.ascontiguousarray(np.asarray(self.X, dtype=float))
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError("Dataset.X must be a (n, d) array with n >= 1, d >= 1")
        if not np.all(np.isfinite(X)):
            raise ValueError("Dataset.X contains non-finite values")
        if X.shape[1] == 1:
            warnings.warn(
                "d=1 data: the scaled norm reduces to |z|; results are valid but "
                "this library is aimed at multivariate data",
                RuntimeWarning,
                stacklevel=2,
            )
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=np.int64)
            if lab.shape != (X.shape[0],):
                raise ValueError("labels must have shape (n,)")
            lab.setflags(write=False)
            self.labels = lab
        if self.outlier_flags is not None:
            fl = np.asarray(self.outlier_flags, dtype=bool)
            if fl.shape != (X.shape[0],):
                raise ValueError("outlier_flags must have shape (n,)")
            fl.setflags(write=False)
            self.outlier_flags = fl
        X.setflags(write=False)
        self.X = X

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


@dataclass
class FitReport:
    """Result of one fit: the selected centers plus bookkeeping.

    `centers` is the returned estimate (for k-medians, the averaged centers).
    `distance_evals` counts scaled-norm evaluations over the entire fit, the
    unit used by the complexity checks.
    """

    algorithm: str
    k: int
    d: int
    centers: np.ndarray
    risk: float
    assignments: np.ndarray
    restart: int = 0
    restarts: int = 1
    rng_seed: object = None
    wall_time: float = 0.0
    distance_evals: int = 0
    n_queries: int = 0
    n_updates: int = 0
    skips: int = 0
    counts: Optional[np.ndarray] = None
    seeds: Optional[np.ndarray] = None
    raw_centers: Optional[np.ndarray] = None
    update_counts: Optional[np.ndarray] = None
    c_gamma: object = None
    c_alpha: Optional[float] = None
    alpha: Optional[float] = None
    medoid_indices: Optional[np.ndarray] = None
    build_evals: Optional[int] = None


# ---------------------------------------------------------------------------
# CSV dataset format: d numeric feature columns, then an optional integer
# `label` column and an optional 0/1 `outlier` column, selected by header name.

_LABEL_COL = "label"
_OUTLIER_COL = "outlier"


def write_csv(dataset: Dataset, path) -> None:
    """Write a dataset to CSV with full float precision (round-trips exactly)."""
    cols = [f"x{j + 1}" for j in range(dataset.d)]
    fmt = ["%.17g"] * dataset.d
    blocks = [dataset.X]
    if dataset.labels is not None:
        cols.append(_LABEL_COL)
        fmt.append("%d")
        blocks.append(dataset.labels[:, None].astype(float))
    if dataset.outlier_flags is not None:
        cols.append(_OUTLIER_COL)
        fmt.append("%d")
        blocks.append(dataset.outlier_flags[:, None].astype(float))
    data = np.hstack(blocks)
    np.savetxt(path, data, fmt=fmt, delimiter=",", header=",".join(cols), comments="")


def read_csv(path) -> Dataset:
    """Read a dataset written by write_csv (or any CSV following the format)."""
    with open(path, "r") as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path}: empty file")
        names = [c.strip() for c in header.split(",")]
        try:
            raw = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ValueError(f"{path}: could not parse numeric data ({exc})") from exc
    if raw.shape[0] == 0:
        raise ValueError(f"{path}: no data rows")
    if raw.shape[1] != len(names):
        raise ValueError(f"{path}: header names {len(names)} columns, rows have {raw.shape[1]}")
    feature_idx = [i for i, c in enumerate(names) if c not in (_LABEL_COL, _OUTLIER_COL)]
    if not feature_idx:
        raise ValueError(f"{path}: no feature columns")
    labels = None
    flags = None
    if _LABEL_COL in names:
        labels = raw[:, names.index(_LABEL_COL)].astype(np.int64)
    if _OUTLIER_COL in names:
        col = raw[:, names.index(_OUTLIER_COL)]
        if not np.all((col == 0) | (col == 1)):
            raise ValueError(f"{path}: outlier column must be 0/1")
        flags = col.astype(bool)
    return Dataset(raw[:, feature_idx], labels=labels, outlier_flags=flags)


# ---------------------------------------------------------------------------
# Model snapshot files (JSON). Deterministic for a fixed fit: no timing fields.


def _arr(a):
    return None if a is None else np.asarray(a).tolist()


def write_model(report: FitReport, path) -> None:
    """Serialize a fit to JSON. Holds everything needed to resume a k-medians
    stream bit-exactly (gain config, seeds, raw and averaged centers, counts)."""
    doc = {
        "format": "seqclust-model",
        "version": 1,
        "algorithm": report.algorithm,
        "k": int(report.k),
        "d": int(report.d),
        "centers": _arr(report.centers),
        "risk": float(report.risk),
        "restart": int(report.restart),
        "restarts": int(report.restarts),
        "rng_seed": report.rng_seed,
        "skips": int(report.skips),
        "n_queries": int(report.n_queries),
        "n_updates": int(report.n_updates),
        "counts": _arr(report.counts),
        "seeds": _arr(report.seeds),
        "raw_centers": _arr(report.raw_centers),
        "update_counts": _arr(report.update_counts),
        "c_gamma": _arr(report.c_gamma) if isinstance(report.c_gamma, np.ndarray) else report.c_gamma,
        "c_alpha": report.c_alpha,
        "alpha": report.alpha,
        "medoid_indices": _arr(report.medoid_indices),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def read_model(path) -> dict:
    with open(path, "r") as fh:
        doc = json.load(fh)
    if doc.get("format") != "seqclust-model":
        raise ValueError(f"{path}: not a seqclust model file")
    for key in ("centers", "seeds", "raw_centers"):
        if doc.get(key) is not None:
            doc[key] = np.asarray(doc[key], dtype=float)
    for key in ("update_counts", "counts", "medoid_indices"):
        if doc.get(key) is not None:
            doc[key] = np.asarray(doc[key], dtype=np.int64)
    return doc
