"""Graph comparison: structural Hamming distance and a single-threshold AUPRC.

Both metrics first pad the two graphs to the union of their node sets, so a
candidate learned on a feature subset is charged for every target edge that
touches a feature it never saw.

AUPRC here treats the candidate skeleton as one binary prediction of the
target skeleton.  Its precision-recall curve has a single operating point,
and the step-interpolated area under it is ``precision * recall``.
"""

from __future__ import annotations

import enum
from typing import Sequence

from .graph import Mark, MixedGraph, pad_to_nodes


class PairState(enum.Enum):
    NONE = "none"
    A_TO_B = "a->b"
    B_TO_A = "b->a"
    UNDIRECTED = "a--b"
    BIDIRECTED = "a<->b"
    PARTIAL = "partial"


def pair_state(g: MixedGraph, a: str, b: str) -> PairState:
    """State of the unordered pair as seen from ``a`` to ``b``."""
    marks = g.marks(a, b) if a in g and b in g else None
    if marks is None:
        return PairState.NONE
    if marks == (Mark.TAIL, Mark.ARROW):
        return PairState.A_TO_B
    if marks == (Mark.ARROW, Mark.TAIL):
        return PairState.B_TO_A
    if marks == (Mark.TAIL, Mark.TAIL):
        return PairState.UNDIRECTED
    if marks == (Mark.ARROW, Mark.ARROW):
        return PairState.BIDIRECTED
    return PairState.PARTIAL


def _union_nodes(g1: MixedGraph, g2: MixedGraph) -> tuple[str, ...]:
    seen = dict.fromkeys(g1.nodes)
    seen.update(dict.fromkeys(g2.nodes))
    return tuple(seen)


def _pairs_with_edges(*graphs: MixedGraph) -> set[tuple[str, str]]:
    out = set()
    for g in graphs:
        for e in g.edges:
            out.add((min(e.a, e.b), max(e.a, e.b)))
    return out


def shd(target: MixedGraph, candidate: MixedGraph) -> int:
    """Number of unordered pairs whose edge state differs (a reversal counts once)."""
    nodes = _union_nodes(target, candidate)
    t = pad_to_nodes(target, nodes)
    c = pad_to_nodes(candidate, nodes)
    mismatched = 0
    for a, b in _pairs_with_edges(t, c):
        if t.marks(a, b) != c.marks(a, b):
            mismatched += 1
    return mismatched


def _skeleton_pairs(g: MixedGraph) -> set[frozenset[str]]:
    return {frozenset((e.a, e.b)) for e in g.edges}


def precision_recall(target: MixedGraph, candidate: MixedGraph) -> tuple[int, int, int]:
    """``(tp, fp, fn)`` over skeleton adjacencies."""
    t = _skeleton_pairs(target)
    c = _skeleton_pairs(candidate)
    tp = len(t & c)
    return tp, len(c - t), len(t - c)


def auprc(target: MixedGraph, candidate: MixedGraph) -> float:
    tp, fp, fn = precision_recall(target, candidate)
    if tp + fn == 0:
        # no target edges: perfect only when nothing is predicted either
        return 1.0 if fp == 0 else 0.0
    if tp + fp == 0:
        return 0.0
    precision = tp / (tp + fp)
    recall = tp / (tp + fn)
    return precision * recall


def metric_table(target: MixedGraph, candidates: Sequence[MixedGraph]) -> list[tuple[int, int, float]]:
    return [(i, shd(target, g), auprc(target, g)) for i, g in enumerate(candidates)]
