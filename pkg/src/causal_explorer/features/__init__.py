"""Unsupervised feature selection: PFA and real-vs-synthetic separators."""

from .mixture import LABEL_COLUMN, MixtureModel, fit_mixture, make_real_vs_synth
from .pfa import kmeans, pfa
from .ranking import FeatureRanking
from .selectors import SELECTORS, labeled_dataset, rfe, select_features, unsupervised_importance
from .separators import LINEAR, TREE_ENSEMBLE, Separator, train_separator

__all__ = [
    "FeatureRanking",
    "LABEL_COLUMN",
    "LINEAR",
    "MixtureModel",
    "SELECTORS",
    "Separator",
    "TREE_ENSEMBLE",
    "fit_mixture",
    "kmeans",
    "labeled_dataset",
    "make_real_vs_synth",
    "pfa",
    "rfe",
    "select_features",
    "train_separator",
    "unsupervised_importance",
]
