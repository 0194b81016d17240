"""Classifiers that tell real rows from synthetic ones.

Two kinds are provided:

``linear``
    Logistic regression fitted by full-batch gradient descent on
    standardised inputs.  Importance is the normalised absolute coefficient.
``tree``
    A bagged ensemble of depth-limited CART trees with Gini splits and
    per-split feature subsampling.  Importance is the normalised total
    Gini decrease.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..data import Dataset
from ..errors import InputError
from .mixture import LABEL_COLUMN

LINEAR = "linear"
TREE_ENSEMBLE = "tree"
SEPARATOR_KINDS = (LINEAR, TREE_ENSEMBLE)

TRAIN_FRACTION = 0.7


@dataclass(frozen=True)
class Separator:
    kind: str
    feature_names: tuple[str, ...]
    importances: np.ndarray
    holdout_accuracy: float
    model: object = None

    def importance_map(self) -> dict[str, float]:
        return {v: float(w) for v, w in zip(self.feature_names, self.importances)}


def _normalise(w: np.ndarray) -> np.ndarray:
    w = np.abs(np.asarray(w, dtype=float))
    total = w.sum()
    if not total > 0:
        return np.full(len(w), 1.0 / len(w))
    return w / total


# ---------------------------------------------------------------------------
# logistic regression


@dataclass
class LogisticModel:
    mean: np.ndarray
    scale: np.ndarray
    coef: np.ndarray
    intercept: float

    def decision(self, x: np.ndarray) -> np.ndarray:
        return ((x - self.mean) / self.scale) @ self.coef + self.intercept

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.decision(x) > 0).astype(float)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def fit_logistic(x: np.ndarray, y: np.ndarray, lr: float = 0.1, epochs: int = 500,
                 l2: float = 1e-4) -> LogisticModel:
    mean = x.mean(axis=0)
    scale = x.std(axis=0)
    scale[scale <= 1e-12] = 1.0
    z = (x - mean) / scale
    n, p = z.shape
    w = np.zeros(p)
    b = 0.0
    for _ in range(epochs):
        err = _sigmoid(z @ w + b) - y
        w -= lr * (z.T @ err / n + l2 * w)
        b -= lr * err.mean()
    return LogisticModel(mean, scale, w, float(b))


# ---------------------------------------------------------------------------
# CART trees


@dataclass
class Tree:
    feature: np.ndarray  # -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # fraction of class 1 at the node

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        node = np.zeros(len(x), dtype=np.int64)
        while True:
            feat = self.feature[node]
            inner = feat >= 0
            if not inner.any():
                break
            rows = np.flatnonzero(inner)
            f = feat[rows]
            go_left = x[rows, f] <= self.threshold[node[rows]]
            node[rows] = np.where(go_left, self.left[node[rows]], self.right[node[rows]])
        return self.value[node]


def _gini(n1: np.ndarray, n: np.ndarray) -> np.ndarray:
    q = n1 / n
    return 2.0 * q * (1.0 - q)


def _best_split(x: np.ndarray, y: np.ndarray, features: np.ndarray):
    """Best Gini split over ``features``: ``(decrease, feature, threshold)`` or None."""
    m = len(y)
    n1 = y.sum()
    parent = m * _gini(np.array(n1), np.array(m))
    best = None
    for f in features:
        col = x[:, f]
        order = np.argsort(col, kind="stable")
        xs, ys = col[order], y[order]
        valid = np.flatnonzero(xs[1:] != xs[:-1]) + 1  # left size at each cut
        if not len(valid):
            continue
        c1 = np.cumsum(ys)[valid - 1]
        nl = valid.astype(float)
        nr = m - nl
        child = nl * _gini(c1, nl) + nr * _gini(n1 - c1, nr)
        i = int(np.argmin(child))
        decrease = float(parent - child[i])
        if best is None or decrease > best[0]:
            cut = valid[i]
            best = (decrease, int(f), 0.5 * (xs[cut - 1] + xs[cut]))
    return best


def fit_tree(x: np.ndarray, y: np.ndarray, rng: np.random.Generator, max_depth: int = 6,
             max_features: int | None = None) -> tuple[Tree, np.ndarray]:
    """Grow one CART classification tree; returns ``(tree, gini_decrease_per_feature)``."""
    p = x.shape[1]
    mtry = max_features or p
    feature, threshold, left, right, value = [], [], [], [], []
    importance = np.zeros(p)

    def new_node(idx: np.ndarray) -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(y[idx].mean()))
        return len(feature) - 1

    root = new_node(np.arange(len(y)))
    stack = [(root, np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        ys = y[idx]
        if depth >= max_depth or len(idx) < 2 or ys.min() == ys.max():
            continue
        feats = rng.choice(p, size=mtry, replace=False) if mtry < p else np.arange(p)
        split = _best_split(x[idx], ys, feats)
        if split is None or split[0] <= 1e-12:
            continue
        decrease, f, thr = split
        importance[f] += decrease
        mask = x[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        feature[node], threshold[node] = f, thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))
    tree = Tree(np.array(feature), np.array(threshold), np.array(left), np.array(right), np.array(value))
    return tree, importance


@dataclass
class Forest:
    trees: list[Tree]

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return np.mean([t.predict_proba(x) for t in self.trees], axis=0)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return (self.predict_proba(x) > 0.5).astype(float)


def fit_forest(x: np.ndarray, y: np.ndarray, seed: int, n_trees: int = 25,
               max_depth: int = 6) -> tuple[Forest, np.ndarray]:
    """Bagged trees; tree ``t`` draws from its own generator seeded ``seed + t``."""
    n, p = x.shape
    mtry = max(1, int(math.sqrt(p)))
    trees, importance = [], np.zeros(p)
    for t in range(n_trees):
        rng = np.random.default_rng(seed + t)
        rows = rng.integers(0, n, size=n)
        tree, imp = fit_tree(x[rows], y[rows], rng, max_depth, mtry)
        trees.append(tree)
        importance += imp
    return Forest(trees), importance


# ---------------------------------------------------------------------------


def split_labeled(labeled: Dataset, seed: int):
    if LABEL_COLUMN not in labeled.names:
        raise InputError(f"labelled dataset lacks {LABEL_COLUMN!r}")
    j = labeled.index(LABEL_COLUMN)
    features = tuple(v for v in labeled.names if v != LABEL_COLUMN)
    x = np.delete(labeled.values, j, axis=1)
    y = labeled.values[:, j]
    order = np.random.default_rng(seed).permutation(labeled.n)
    cut = int(round(TRAIN_FRACTION * labeled.n))
    tr, te = order[:cut], order[cut:]
    for part, name in ((tr, "training"), (te, "holdout")):
        if len(part) == 0 or y[part].min() == y[part].max():
            raise InputError(f"{name} split contains a single class")
    return features, x[tr], y[tr], x[te], y[te]


def train_separator(labeled: Dataset, kind: str, seed: int = 42) -> Separator:
    """Fit a real-vs-synthetic classifier on a 70/30 split and report holdout accuracy."""
    features, xtr, ytr, xte, yte = split_labeled(labeled, seed)
    if kind == LINEAR:
        model = fit_logistic(xtr, ytr)
        raw = model.coef
    elif kind == TREE_ENSEMBLE:
        model, raw = fit_forest(xtr, ytr, seed)
    else:
        raise InputError(f"unknown separator kind {kind!r}; choose from {SEPARATOR_KINDS}")
    accuracy = float(np.mean(model.predict(xte) == yte))
    return Separator(kind, features, _normalise(raw), accuracy, model)
