"""Synthetic data generators used by the benchmark experiments.

Two Gaussian-mixture designs with point-mass contamination and a large
binary "viewing profile" generator for runtime studies. All generators are
deterministic functions of their seed (numpy PCG64 streams, fixed draw
order), so a seed reproduces a dataset bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .core import Dataset, write_csv

__all__ = [
    "Sim1Config",
    "Sim2Config",
    "sim1_sample",
    "sim2_sample",
    "profiles_sample",
    "save_dataset",
    "SIM1_MEANS",
    "SIM1_COVS",
    "SIM1_OUTLIER",
    "SIM2_RHOS",
    "SIM2_VARIANCE",
    "SIM2_OUTLIER_VALUE",
]

RNG_ID = "numpy-pcg64"

# Mixture of three correlated bivariate Gaussians, outlier atom far outside.
SIM1_MEANS = np.array([[-3.0, -3.0], [3.0, -3.0], [4.5, -4.5]])
SIM1_COVS = np.array(
    [
        [[2.0, 1.0], [1.0, 3.0]],
        [[3.0, 1.0], [1.0, 2.0]],
        [[2.0, -1.0], [-1.0, 3.0]],
    ]
)
SIM1_OUTLIER = np.array([-14.0, 14.0])

# Three phase-shifted sinusoidal mean curves with AR(1) noise.
SIM2_RHOS = (0.1, 0.5, 0.9)
SIM2_PHASES = (0.0, 2.0 * np.pi / 3.0, 4.0 * np.pi / 3.0)
SIM2_VARIANCE = 1.5
SIM2_OUTLIER_VALUE = 4.0


@dataclass(frozen=True)
class Sim1Config:
    n: int
    epsilon: float = 0.0
    seed: int = 0


@dataclass(frozen=True)
class Sim2Config:
    n: int
    d: int
    epsilon: float = 0.0
    scale: float = 1.0
    seed: int = 0


def _check_common(n, epsilon):
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0.0 <= epsilon <= 1.0):
        raise ValueError("epsilon must lie in [0, 1]")


def sim1_sample(config: Sim1Config) -> Dataset:
    """Contaminated three-component bivariate mixture.

    Each row is independently an outlier with probability epsilon (the atom
    exactly, label -1, flag set) or a draw from a uniformly chosen component
    (label 0..2).
    """
    _check_common(config.n, config.epsilon)
    n = config.n
    rng = np.random.default_rng(config.seed)
    is_out = rng.random(n) < config.epsilon
    comp = rng.integers(0, 3, size=n)
    eta = rng.standard_normal((n, 2))
    chol = np.linalg.cholesky(SIM1_COVS)
    X = np.empty((n, 2))
    for c in range(3):
        sel = comp == c
        X[sel] = SIM1_MEANS[c] + eta[sel] @ chol[c].T
    X[is_out] = SIM1_OUTLIER
    labels = np.where(is_out, -1, comp)
    return Dataset(X, labels=labels, outlier_flags=is_out)


def sim2_sample(config: Sim2Config) -> Dataset:
    """Contaminated sinusoidal-mean mixture in dimension d with AR(1) noise.

    Mean curves mu_ij = 2 sin(phase_i + 2 pi j / (d - 1)) for j = 1..d; the
    noise has stationary variance 1.5 per coordinate and autocorrelation
    rho_i^|j - l| via the forward recursion (O(d) per row). Outlier rows are
    the constant vector 4. The whole row is multiplied by `scale`.
    """
    _check_common(config.n, config.epsilon)
    n, d = config.n, config.d
    if d < 2:
        raise ValueError("sim2 needs d >= 2")
    if config.scale <= 0:
        raise ValueError("scale must be positive")
    rng = np.random.default_rng(config.seed)
    is_out = rng.random(n) < config.epsilon
    comp = rng.integers(0, 3, size=n)
    eta = rng.standard_normal((n, d))

    j = np.arange(1, d + 1)
    means = np.stack([2.0 * np.sin(ph + 2.0 * np.pi * j / (d - 1)) for ph in SIM2_PHASES])

    X = np.empty((n, d))
    sd = np.sqrt(SIM2_VARIANCE)
    for c, rho in enumerate(SIM2_RHOS):
        sel = comp == c
        if not np.any(sel):
            continue
        e = np.empty((int(sel.sum()), d))
        e[:, 0] = sd * eta[sel, 0]
        innov = np.sqrt(SIM2_VARIANCE * (1.0 - rho * rho))
        sub = eta[sel]
        for col in range(1, d):
            e[:, col] = rho * e[:, col - 1] + innov * sub[:, col]
        X[sel] = means[c] + e
    X[is_out] = SIM2_OUTLIER_VALUE
    X *= config.scale
    labels = np.where(is_out, -1, comp)
    return Dataset(X, labels=labels, outlier_flags=is_out)


def profiles_sample(n: int = 5422, d: int = 1440, seed: int = 0) -> Dataset:
    """Binary daily viewing profiles: each row is a union of random
    on-intervals over d minutes, values in {0, 1}. No labels."""
    if n < 1 or d < 2:
        raise ValueError("need n >= 1 and d >= 2")
    rng = np.random.default_rng(seed)
    X = np.zeros((n, d))
    n_iv = rng.integers(1, 6, size=n)
    for i in range(n):
        starts = rng.integers(0, d, size=n_iv[i])
        lengths = rng.integers(5, 241, size=n_iv[i])
        for s, ln in zip(starts, lengths):
            X[i, s : min(d, s + ln)] = 1.0
    return Dataset(X)


def save_dataset(dataset: Dataset, csv_path, generator: str, config) -> str:
    """Write the dataset CSV plus a JSON sidecar recording how it was made.

    Returns the sidecar path (same stem, .json extension).
    """
    write_csv(dataset, csv_path)
    params = asdict(config) if hasattr(config, "__dataclass_fields__") else dict(config)
    meta = {
        "generator": generator,
        "params": params,
        "rng": RNG_ID,
        "package_version": __version__,
        "n": dataset.n,
        "d": dataset.d,
        "has_labels": dataset.labels is not None,
        "has_outlier_flags": dataset.outlier_flags is not None,
    }
    sidecar = str(csv_path)
    sidecar = sidecar[: -len(".csv")] + ".json" if sidecar.endswith(".csv") else sidecar + ".json"
    with open(sidecar, "w") as fh:
        json.dump(meta, fh, sort_keys=True, indent=1)
        fh.write("\n")
    return sidecar
