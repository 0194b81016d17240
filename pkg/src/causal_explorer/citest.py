"""Conditional independence tests.

Every tester exposes ``alpha`` and ``test(i, j, S) -> CiResult`` where ``i``
and ``j`` are column names and ``S`` is an iterable of names.  Verdicts are
symmetric in ``i`` and ``j``.

Normal tail probabilities use :func:`math.erfc` (libm, accurate to a few ulp);
chi-square tails use :func:`scipy.special.chdtrc` (Cephes incomplete gamma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Protocol

import numpy as np
from scipy.special import chdtrc

from .data import Dataset, standardize
from .errors import InputError, NumericalError

R_CLAMP = 1.0 - 1e-12
RIDGE = 1e-8


@dataclass(frozen=True)
class CiResult:
    statistic: float
    p_value: float
    independent: bool
    cond_size: int


class CiTester(Protocol):
    alpha: float

    def test(self, i: str, j: str, cond: Iterable[str] = ()) -> CiResult: ...


def _check_alpha(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    return float(alpha)


def _clean_query(ds: Dataset, i: str, j: str, cond) -> tuple[int, int, list[int]]:
    if i == j:
        raise InputError("i and j must differ")
    cond = sorted(set(cond))
    if i in cond or j in cond:
        raise InputError("i and j must not appear in the conditioning set")
    return ds.index(i), ds.index(j), [ds.index(s) for s in cond]


def _partial_corr_from(corr: np.ndarray, a: int, b: int, cond: list[int]) -> float:
    if not cond:
        r = corr[a, b]
    else:
        idx = [a, b, *cond]
        sub = corr[np.ix_(idx, idx)]
        omega = None
        for ridge in (0.0, RIDGE):
            m = sub + ridge * np.eye(len(idx))
            if np.linalg.cond(m) > 1e14:
                continue
            try:
                omega = np.linalg.inv(m)
            except np.linalg.LinAlgError:
                continue
            break
        if omega is None:
            raise NumericalError(f"singular correlation submatrix for columns {idx}")
        denom = math.sqrt(omega[0, 0] * omega[1, 1])
        if not denom > 0:
            raise NumericalError(f"non-positive precision diagonal for columns {idx}")
        r = -omega[0, 1] / denom
    return float(min(R_CLAMP, max(-R_CLAMP, r)))


def _correlation(ds: Dataset) -> np.ndarray:
    x = standardize(ds).values
    n = x.shape[0]
    corr = (x.T @ x) / (n - 1)
    np.fill_diagonal(corr, 1.0)
    # constant columns standardize to zero: treat as uncorrelated with all
    return corr


def partial_correlation(ds: Dataset, i: str, j: str, cond: Iterable[str] = ()) -> float:
    """Partial correlation of ``i`` and ``j`` given ``cond``, clamped to +-(1 - 1e-12)."""
    a, b, c = _clean_query(ds, i, j, cond)
    for k in (a, b, *c):
        if ds.kinds[k].is_discrete:
            raise InputError(f"column {ds.names[k]!r} is discrete; partial correlation needs continuous data")
    if ds.n <= len(c) + 2:
        raise InputError(f"need n > |S| + 2, got n={ds.n}, |S|={len(c)}")
    idx = [a, b, *c]
    corr = _correlation(Dataset.continuous([ds.names[k] for k in idx], ds.values[:, idx]))
    return _partial_corr_from(corr, 0, 1, list(range(2, len(idx))))


def fisher_z_from_r(r: float, n: int, cond_size: int, alpha: float) -> CiResult:
    dof = n - cond_size - 3
    if dof < 1:
        raise InputError(f"need n - |S| - 3 >= 1, got n={n}, |S|={cond_size}")
    r = min(R_CLAMP, max(-R_CLAMP, r))
    z = math.sqrt(dof) * 0.5 * math.log((1.0 + r) / (1.0 - r))
    p = math.erfc(abs(z) / math.sqrt(2.0))
    p = min(1.0, max(0.0, p))
    return CiResult(statistic=z, p_value=p, independent=p > alpha, cond_size=cond_size)


class FisherZTester:
    """Fisher-z partial-correlation test over a continuous dataset.

    The correlation matrix is computed once, at construction, so one tester
    can serve concurrent callers.
    """

    def __init__(self, ds: Dataset, alpha: float = 0.05, strict_kinds: bool = True):
        self.alpha = _check_alpha(alpha)
        if strict_kinds and not ds.all_continuous:
            raise InputError("Fisher-z needs continuous columns")
        self.ds = ds
        self.corr = _correlation(ds)
        self.calls = 0

    def test(self, i: str, j: str, cond: Iterable[str] = ()) -> CiResult:
        a, b, c = _clean_query(self.ds, i, j, cond)
        # canonical order keeps the verdict exactly symmetric
        if a > b:
            a, b = b, a
        self.calls += 1
        if self.ds.n <= len(c) + 2:
            raise InputError(f"need n > |S| + 2, got n={self.ds.n}, |S|={len(c)}")
        r = _partial_corr_from(self.corr, a, b, c)
        return fisher_z_from_r(r, self.ds.n, len(c), self.alpha)


def fisher_z_test(ds: Dataset, i: str, j: str, cond: Iterable[str] = (), alpha: float = 0.05) -> CiResult:
    return FisherZTester(ds, alpha).test(i, j, cond)


class GSquaredTester:
    """G-squared (likelihood-ratio) test for discrete columns.

    Strata of the conditioning set with no observations, and cells whose
    expected count is zero, contribute nothing to the statistic.
    """

    def __init__(self, ds: Dataset, alpha: float = 0.05):
        self.alpha = _check_alpha(alpha)
        if not ds.all_discrete:
            raise InputError("G-squared needs discrete columns")
        self.ds = ds
        self.codes = ds.values.astype(np.int64)
        self.card = [k.cardinality for k in ds.kinds]
        self.calls = 0

    def test(self, i: str, j: str, cond: Iterable[str] = ()) -> CiResult:
        a, b, c = _clean_query(self.ds, i, j, cond)
        if a > b:
            a, b = b, a
        self.calls += 1
        x, y = self.codes[:, a], self.codes[:, b]
        ra, rb = self.card[a], self.card[b]
        stratum = np.zeros(self.ds.n, dtype=np.int64)
        n_strata = 1
        for k in c:
            stratum = stratum * self.card[k] + self.codes[:, k]
            n_strata *= self.card[k]
        # compress to observed strata only
        _, stratum = np.unique(stratum, return_inverse=True)
        n_obs = int(stratum.max()) + 1
        counts = np.zeros((n_obs, ra, rb))
        np.add.at(counts, (stratum, x, y), 1.0)
        n_s = counts.sum(axis=(1, 2), keepdims=True)
        row = counts.sum(axis=2, keepdims=True)
        col = counts.sum(axis=1, keepdims=True)
        expected = row * col / n_s
        mask = (counts > 0) & (expected > 0)
        g2 = 2.0 * float(np.sum(counts[mask] * np.log(counts[mask] / expected[mask])))
        g2 = max(g2, 0.0)
        dof = (ra - 1) * (rb - 1) * n_strata
        p = float(chdtrc(dof, g2))
        return CiResult(statistic=g2, p_value=p, independent=p > self.alpha, cond_size=len(c))


def g_squared_test(ds: Dataset, i: str, j: str, cond: Iterable[str] = (), alpha: float = 0.05) -> CiResult:
    return GSquaredTester(ds, alpha).test(i, j, cond)


def make_tester(ds: Dataset, alpha: float = 0.05) -> CiTester:
    """G-squared for all-discrete data, Fisher-z otherwise.

    Mixed datasets are tested with Fisher-z, treating integer codes as
    numeric values.
    """
    if ds.all_discrete:
        return GSquaredTester(ds, alpha)
    return FisherZTester(ds, alpha, strict_kinds=False)
