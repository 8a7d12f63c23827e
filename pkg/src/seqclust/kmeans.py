"""Recursive (single pass) k-means after MacQueen.

Each observation updates only its nearest center, with step 1/(1 + n_r)
where n_r counts the seed plus the points allocated to cluster r so far.
Centers therefore stay exact barycenters of the seed and the allocated
points at every step.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .core import Dataset, FitReport, _check_centers, normalized_distances

__all__ = ["KMeansState", "kmeans_init", "kmeans_step", "kmeans_fit"]


@dataclass
class KMeansState:
    centers: np.ndarray  # (k, d) running barycenters
    counts: np.ndarray   # (k,) allocation counts, seed included


def _check_seeds(seeds) -> np.ndarray:
    s = _check_centers(seeds)
    k = s.shape[0]
    for a in range(k):
        for b in range(a + 1, k):
            if np.array_equal(s[a], s[b]):
                raise ValueError(f"seeds {a} and {b} coincide; seeds must be pairwise distinct")
    return s.copy()


def kmeans_init(seeds) -> KMeansState:
    """Start a stream from k pairwise distinct seed points (count 1 each)."""
    s = _check_seeds(seeds)
    return KMeansState(centers=s, counts=np.ones(s.shape[0], dtype=np.int64))


def _step_inplace(centers, counts, z) -> int:
    diff = centers - z
    r = int(np.argmin((diff * diff).sum(axis=1)))
    centers[r] -= diff[r] / (1.0 + counts[r])
    counts[r] += 1
    return r


def _run_stream(centers, counts, X) -> None:
    """Consume all rows of X in order. Low dimensions use a scalar loop; the
    per-row numpy overhead dominates the arithmetic at small k*d, and the
    operation order is identical (numpy sums of <= 8 elements are sequential)."""
    k, d = centers.shape
    if d > 8:
        for z in X:
            _step_inplace(centers, counts, z)
        return
    cent = [list(map(float, row)) for row in centers]
    cnt = [int(c) for c in counts]
    for z in X.tolist():
        best_sq = float("inf")
        r = 0
        for i in range(k):
            row = cent[i]
            s = 0.0
            for j in range(d):
                t = row[j] - z[j]
                s += t * t
            if s < best_sq:
                best_sq = s
                r = i
        row = cent[r]
        w = 1.0 + cnt[r]
        for j in range(d):
            row[j] -= (row[j] - z[j]) / w
        cnt[r] += 1
    centers[:] = cent
    counts[:] = cnt


def kmeans_step(state: KMeansState, z) -> KMeansState:
    """Consume one observation, returning the new state (input left untouched)."""
    z = np.asarray(z, dtype=float)
    if z.shape != (state.centers.shape[1],):
        raise ValueError("kmeans_step: dimension mismatch")
    if not np.all(np.isfinite(z)):
        raise ValueError("kmeans_step: non-finite observation")
    centers = state.centers.copy()
    counts = state.counts.copy()
    _step_inplace(centers, counts, z)
    return KMeansState(centers=centers, counts=counts)


def draw_seeds(X, k, rng, attempts=16) -> np.ndarray:
    """Draw k pairwise distinct rows uniformly without replacement.

    Datasets with duplicated rows may defeat the draw; after a bounded number
    of attempts the duplicates get an epsilon-scale jitter instead.
    """
    n = X.shape[0]
    idx = None
    for _ in range(attempts):
        idx = rng.choice(n, size=k, replace=False)
        s = X[idx]
        if len({row.tobytes() for row in s}) == k:
            return s.copy()
    s = X[idx].astype(float).copy()
    scale = max(1.0, float(np.abs(s).max())) * np.finfo(float).eps * 8
    while len({row.tobytes() for row in s}) < k:
        seen = set()
        for i in range(k):
            key = s[i].tobytes()
            if key in seen:
                s[i] = s[i] + rng.standard_normal(s.shape[1]) * scale
            seen.add(key)
    return s


def kmeans_fit(
    data,
    k: int,
    *,
    seeds=None,
    restarts: int = 10,
    seed=None,
    shuffle: bool = False,
) -> FitReport:
    """One pass of MacQueen k-means over the data, best of `restarts` by L1 risk.

    With explicit `seeds` a single run is performed. Otherwise each restart
    draws k distinct rows as seeds from its own RNG substream; the fit with
    the lowest empirical L1 risk is returned.
    """
    X = data.X if isinstance(data, Dataset) else np.asarray(data, dtype=float)
    n, d = X.shape
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < k:
        raise ValueError(f"need at least k={k} observations, got n={n}")
    t0 = time.perf_counter()
    ss = np.random.SeedSequence(seed)
    if seeds is not None:
        restarts = 1
        children = [ss]
    else:
        if restarts < 1:
            raise ValueError("restarts must be >= 1")
        children = ss.spawn(restarts)

    evals = 0
    best = None
    for ridx in range(restarts):
        rng = np.random.default_rng(children[ridx])
        s = _check_seeds(seeds) if seeds is not None else draw_seeds(X, k, rng)
        order = rng.permutation(n) if shuffle else np.arange(n)
        centers = s.copy()
        counts = np.ones(k, dtype=np.int64)
        _run_stream(centers, counts, X[order] if shuffle else X)
        evals += n * k
        D = normalized_distances(X, centers)
        evals += n * k
        risk = float(D.min(axis=1).mean())
        if best is None or risk < best[0]:
            best = (risk, centers, counts, D.argmin(axis=1), ridx, s)

    risk, centers, counts, assignments, ridx, s = best
    return FitReport(
        algorithm="kmeans",
        k=k,
        d=d,
        centers=centers,
        risk=risk,
        assignments=assignments,
        restart=ridx,
        restarts=restarts,
        rng_seed=seed,
        wall_time=time.perf_counter() - t0,
        distance_evals=evals,
        n_queries=n,
        n_updates=n,
        counts=counts,
        seeds=s,
    )
