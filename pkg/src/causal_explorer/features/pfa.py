"""Principal Feature Analysis with a small seeded k-means."""

from __future__ import annotations

import numpy as np

from ..data import Dataset, as_continuous, standardize
from ..errors import InputError, NumericalError
from .ranking import FeatureRanking

VARIANCE_KEPT = 0.90
UNSELECTED_OFFSET = -1e6


def kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = x.shape[0]
    centers = [x[rng.integers(n)]]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            i = rng.integers(n)
        else:
            i = rng.choice(n, p=d2 / total)
        centers.append(x[i])
        d2 = np.minimum(d2, np.sum((x - x[i]) ** 2, axis=1))
    return np.array(centers)


def kmeans(x: np.ndarray, k: int, rng: np.random.Generator, max_iter: int = 100):
    """Lloyd's algorithm from a k-means++ start.

    Returns ``(centers, labels, inertia)``.  An emptied cluster keeps its
    previous centre.
    """
    x = np.asarray(x, dtype=float)
    if not 1 <= k <= x.shape[0]:
        raise InputError(f"k must lie in [1, n], got k={k}, n={x.shape[0]}")
    centers = kmeans_pp_init(x, k, rng)
    labels = None
    for _ in range(max_iter):
        d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new = np.argmin(d2, axis=1)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for c in range(k):
            members = x[labels == c]
            if len(members):
                centers[c] = members.mean(axis=0)
    d2 = ((x[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(len(x)), labels].sum())
    return centers, labels, inertia


def principal_loadings(ds: Dataset, k: int) -> np.ndarray:
    """Rows of the top-q eigenvectors of the correlation matrix.

    ``q`` is the smallest count explaining 90% of the variance, clipped to
    ``[1, k]``.
    """
    z = standardize(as_continuous(ds)).values
    n = z.shape[0]
    corr = (z.T @ z) / max(n - 1, 1)
    try:
        evals, evecs = np.linalg.eigh(corr)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(evals)[::-1]
    evals, evecs = np.clip(evals[order], 0.0, None), evecs[:, order]
    total = evals.sum()
    if total > 0:
        q = int(np.searchsorted(np.cumsum(evals) / total, VARIANCE_KEPT - 1e-12) + 1)
    else:
        q = 1
    q = max(1, min(q, k, len(evals)))
    return evecs[:, :q]


def pfa(ds: Dataset, k: int, seed: int = 42) -> FeatureRanking:
    """Pick one representative feature per k-means cluster of loading rows.

    The representative is the row closest to its cluster centre and scores
    minus that distance.  All other features score below every
    representative.  Columns are processed in name order so the result does
    not depend on column order.
    """
    if not 1 <= k <= ds.p:
        raise InputError(f"k must lie in [1, {ds.p}], got {k}")
    names = sorted(ds.names)
    ordered = Dataset(tuple(names), tuple(ds.kind(v) for v in names),
                      ds.values[:, [ds.index(v) for v in names]])
    rows = principal_loadings(ordered, k)
    rng = np.random.default_rng(seed)
    centers, labels, _ = kmeans(rows, k, rng)
    dist = np.round(np.linalg.norm(rows - centers[labels], axis=1), 10)
    scores = {}
    for c in range(k):
        members = np.flatnonzero(labels == c)
        if not len(members):
            continue
        best = min(members, key=lambda i: (dist[i], names[i]))
        for i in members:
            scores[names[i]] = -float(dist[i]) if i == best else UNSELECTED_OFFSET - float(dist[i])
    return FeatureRanking.from_scores("pfa", scores, k)
