"""Evaluation metrics: empirical L1 risk and clustering error rate."""

from __future__ import annotations

import numpy as np

from .core import normalized_distances

__all__ = ["empirical_l1_risk", "cer"]


def empirical_l1_risk(data, centers) -> float:
    """Mean scaled distance from each observation to its nearest center.

    `data` may be a Dataset or a plain (n, d) array.
    """
    X = getattr(data, "X", data)
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("empirical_l1_risk: need a non-empty (n, d) sample")
    D = normalized_distances(X, centers)
    return float(D.min(axis=1).mean())


def cer(p, q, outlier_flags=None) -> float:
    """Clustering error rate between two partitions given by label vectors.

    Fraction of unordered pairs on which the partitions disagree about
    co-membership. Label values are irrelevant, only the induced partition
    matters. Rows with a true outlier flag are excluded from the pair set.
    """
    p = np.asarray(p)
    q = np.asarray(q)
    if p.ndim != 1 or p.shape != q.shape:
        raise ValueError("cer: p and q must be 1-d arrays of equal length")
    if outlier_flags is not None:
        keep = ~np.asarray(outlier_flags, dtype=bool)
        if keep.shape != p.shape:
            raise ValueError("cer: outlier_flags length mismatch")
        p = p[keep]
        q = q[keep]
    m = p.size
    if m < 2:
        raise ValueError("cer: need at least 2 elements after outlier exclusion")
    iu = np.triu_indices(m, k=1)
    same_p = (p[:, None] == p[None, :])[iu]
    same_q = (q[:, None] == q[None, :])[iu]
    # integer count over integer pair total, so equal partitions give exactly 0.0
    return float(np.count_nonzero(same_p != same_q) / same_p.size)
