"""Diagonal-covariance Gaussian mixtures fitted by EM, with BIC model selection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..data import CONTINUOUS, ColumnKind, Dataset
from ..errors import InputError
from .pfa import kmeans

VAR_FLOOR = 1e-6
LABEL_COLUMN = "__synthetic_label__"


def _logsumexp_rows(a: np.ndarray) -> np.ndarray:
    top = a.max(axis=1)
    return top + np.log(np.exp(a - top[:, None]).sum(axis=1))


@dataclass(frozen=True)
class MixtureModel:
    weights: np.ndarray  # (K,)
    means: np.ndarray  # (K, p)
    variances: np.ndarray  # (K, p)

    @property
    def n_components(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def n_parameters(self) -> int:
        k, p = self.means.shape
        return (k - 1) + 2 * k * p

    def component_log_density(self, x: np.ndarray) -> np.ndarray:
        """``log(w_k N(x | mu_k, diag(var_k)))`` with shape (n, K)."""
        x = np.asarray(x, dtype=float)
        prec = 1.0 / self.variances
        log_det = np.sum(np.log(2.0 * math.pi * self.variances), axis=1)
        # sum_j (x_j - mu_kj)^2 / var_kj, expanded into matrix products
        quad = (x * x) @ prec.T - 2.0 * x @ (self.means * prec).T + np.sum(self.means ** 2 * prec, axis=1)
        quad = np.maximum(quad, 0.0)
        return np.log(self.weights)[None, :] - 0.5 * (log_det[None, :] + quad)

    def log_likelihood(self, x: np.ndarray) -> float:
        return float(_logsumexp_rows(self.component_log_density(x)).sum())

    def bic(self, x: np.ndarray) -> float:
        return -2.0 * self.log_likelihood(x) + self.n_parameters() * math.log(len(x))

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        comp = rng.choice(self.n_components, size=n, p=self.weights)
        noise = rng.standard_normal((n, self.dim))
        return self.means[comp] + noise * np.sqrt(self.variances[comp])


def _m_step(x: np.ndarray, resp: np.ndarray) -> MixtureModel:
    nk = resp.sum(axis=0) + 10 * np.finfo(float).eps
    means = (resp.T @ x) / nk[:, None]
    second = (resp.T @ (x * x)) / nk[:, None]
    variances = np.maximum(second - means * means, VAR_FLOOR)
    weights = nk / nk.sum()
    return MixtureModel(weights, means, variances)


def fit_em(x: np.ndarray, n_components: int, rng: np.random.Generator,
           tol: float = 1e-6, max_iter: int = 200) -> tuple[MixtureModel, float]:
    """One EM run from a k-means start.  Returns ``(model, log_likelihood)``.

    Stops when the mean per-sample log-likelihood changes by less than ``tol``.
    """
    n = len(x)
    _, labels, _ = kmeans(x, n_components, rng)
    resp = np.zeros((n, n_components))
    resp[np.arange(n), labels] = 1.0
    model = _m_step(x, resp)
    prev = -np.inf
    ll = prev
    for _ in range(max_iter):
        logp = model.component_log_density(x)
        norm = _logsumexp_rows(logp)
        ll = float(norm.sum())
        if abs(ll - prev) / n < tol:
            break
        prev = ll
        resp = np.exp(logp - norm[:, None])
        model = _m_step(x, resp)
    ll = model.log_likelihood(x)
    return model, ll


def fit_mixture(ds: Dataset, k_max: int = 10, seed: int = 42, restarts: int = 3) -> MixtureModel:
    """Fit K = 1..k_max components (best of ``restarts`` each), keep the lowest BIC."""
    if k_max < 1:
        raise InputError("k_max must be >= 1")
    if ds.n < 2:
        raise InputError("need at least 2 rows to fit a mixture")
    x = ds.values
    rng = np.random.default_rng(seed)
    best, best_bic = None, np.inf
    for k in range(1, min(k_max, ds.n) + 1):
        runs = [fit_em(x, k, rng) for _ in range(restarts)]
        model, ll = max(runs, key=lambda r: r[1])
        bic = -2.0 * ll + model.n_parameters() * math.log(ds.n)
        if bic < best_bic:
            best, best_bic = model, bic
    return best


def make_real_vs_synth(ds: Dataset, model: MixtureModel, seed: int = 42) -> Dataset:
    """Stack ``n`` real rows (label 1) on ``n`` mixture draws (label 0), shuffled.

    Mixture draws are continuous, so every feature column of the result is
    marked CONTINUOUS; the label column is DISCRETE(2).
    """
    if LABEL_COLUMN in ds.names:
        raise InputError(f"column name {LABEL_COLUMN!r} is reserved")
    if model.dim != ds.p:
        raise InputError(f"mixture dimension {model.dim} does not match p={ds.p}")
    rng = np.random.default_rng(seed)
    synth = model.sample(ds.n, rng)
    x = np.vstack([ds.values, synth])
    label = np.concatenate([np.ones(ds.n), np.zeros(ds.n)])
    order = rng.permutation(2 * ds.n)
    values = np.column_stack([x, label])[order]
    kinds: tuple[ColumnKind, ...] = (CONTINUOUS,) * ds.p + (ColumnKind.discrete(2),)
    return Dataset(ds.names + (LABEL_COLUMN,), kinds, values)
