"""Unsupervised feature selectors built on the real-vs-synthetic trick."""

from __future__ import annotations

from ..data import Dataset, select_columns
from ..errors import InputError
from .mixture import LABEL_COLUMN, fit_mixture, make_real_vs_synth
from .pfa import pfa
from .ranking import FeatureRanking
from .separators import LINEAR, TREE_ENSEMBLE, fit_logistic, split_labeled, train_separator

SELECTORS = ("pfa", "linear", "tree", "rfe")
MIXTURE_K_MAX = 10


def labeled_dataset(ds: Dataset, seed: int = 42) -> Dataset:
    """Real rows plus an equal number of mixture draws, with the synthetic label."""
    return make_real_vs_synth(ds, fit_mixture(ds, MIXTURE_K_MAX, seed), seed)


def _check_k(ds: Dataset, k: int) -> None:
    if not 1 <= k <= ds.p:
        raise InputError(f"k must lie in [1, {ds.p}], got {k}")


def unsupervised_importance(ds: Dataset, kind: str, k: int, seed: int = 42,
                            labeled: Dataset | None = None) -> FeatureRanking:
    """Rank features by how much a real-vs-synthetic classifier relies on them.

    The classifier's own predictions are discarded; only its importances are
    kept.  ``labeled`` may be passed to reuse a prepared real-vs-synthetic
    set.
    """
    _check_k(ds, k)
    if ds.p == 1:
        return FeatureRanking.from_scores(kind, {ds.names[0]: 1.0}, 1)
    labeled = labeled if labeled is not None else labeled_dataset(ds, seed)
    sep = train_separator(labeled, kind, seed)
    return FeatureRanking.from_scores(kind, sep.importance_map(), k)


def rfe(ds: Dataset, k: int, seed: int = 42, labeled: Dataset | None = None) -> FeatureRanking:
    """Recursive feature elimination with the linear separator.

    Drops the feature with the smallest absolute coefficient until ``k``
    remain.  A feature's score is the round it was eliminated in; survivors
    share the highest score.
    """
    _check_k(ds, k)
    if k == ds.p:
        return FeatureRanking.from_scores("rfe", {v: 0.0 for v in ds.names}, k)
    labeled = labeled if labeled is not None else labeled_dataset(ds, seed)
    remaining = list(ds.names)
    scores: dict[str, float] = {}
    round_no = 0
    while len(remaining) > k:
        round_no += 1
        sub = select_columns(labeled, remaining + [LABEL_COLUMN])
        features, xtr, ytr, _, _ = split_labeled(sub, seed)
        coef = abs(fit_logistic(xtr, ytr).coef)
        drop = min(range(len(features)), key=lambda i: (coef[i], features[i]))
        scores[features[drop]] = float(round_no)
        remaining.remove(features[drop])
    for v in remaining:
        scores[v] = float(round_no + 1)
    return FeatureRanking.from_scores("rfe", scores, k)


def select_features(name: str, ds: Dataset, k: int, seed: int = 42,
                    labeled: Dataset | None = None) -> FeatureRanking:
    """Dispatch on selector name: ``pfa``, ``linear``, ``tree`` or ``rfe``."""
    if name == "pfa":
        return pfa(ds, k, seed)
    if name == "linear":
        return unsupervised_importance(ds, LINEAR, k, seed, labeled)
    if name == "tree":
        return unsupervised_importance(ds, TREE_ENSEMBLE, k, seed, labeled)
    if name == "rfe":
        return rfe(ds, k, seed, labeled)
    raise InputError(f"unknown feature selector {name!r}; choose from {SELECTORS}")
