"""Causal discovery: IC, PC-stable (with latent-conflict flagging) and BIC hill climbing.

The constraint-based searches share one orientation stage:

1. for every non-adjacent pair ``a, b`` with a common neighbour ``c`` that is
   not in the separating set of ``a, b``, put arrowheads at ``c`` on both
   edges.  An arrowhead is never removed, so two colliders that disagree on
   an edge leave it bidirected (``a <-> b``); such pairs are reported as
   latent-confounder suspects.
2. apply Meek's rules to the remaining undirected edges.

Nodes are processed in lexicographic order of their names.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .citest import CiTester
from .data import Dataset
from .errors import InputError
from .graph import ARROW, TAIL, MixedGraph, meek_closure
from .scoring import BicScore, LocalScoreCache

ALGORITHMS = ("ic", "pc", "hc")
DEFAULT_MAX_COND = 3


@dataclass
class DiscoveryResult:
    graph: MixedGraph
    sepsets: dict[frozenset[str], frozenset[str]]
    latent_edges: list[tuple[str, str]]
    algorithm: str
    stats: dict = field(default_factory=dict)


class DiscoveryError(RuntimeError):
    """A CI test failed mid-search; ``pair`` and ``cond`` locate the query."""

    def __init__(self, pair, cond, cause: Exception):
        self.pair = pair
        self.cond = cond
        super().__init__(f"CI test failed for {pair} given {sorted(cond)}: {cause}")


def _run_test(tester: CiTester, a: str, b: str, cond: Sequence[str]) -> bool:
    try:
        return tester.test(a, b, cond).independent
    except Exception as exc:  # noqa: BLE001 - re-raised with context
        raise DiscoveryError((a, b), cond, exc) from exc


def _check_vars(vars: Sequence[str], max_cond: int) -> list[str]:
    if max_cond < 0:
        raise InputError("max_cond must be >= 0")
    names = sorted(vars)
    if len(set(names)) != len(names):
        raise InputError("duplicate variable names")
    return names


def _orient(names: list[str], adj: np.ndarray, sepsets: dict) -> tuple[np.ndarray, list[tuple[str, str]]]:
    p = len(names)
    m = np.where(adj, TAIL, 0).astype(np.int8)
    for a, b in combinations(range(p), 2):
        if adj[a, b]:
            continue
        sep = sepsets.get(frozenset((names[a], names[b])))
        if sep is None:
            continue
        for c in range(p):
            if adj[a, c] and adj[b, c] and names[c] not in sep:
                m[a, c] = ARROW
                m[b, c] = ARROW
    latent = [
        (names[a], names[b])
        for a, b in combinations(range(p), 2)
        if m[a, b] == ARROW and m[b, a] == ARROW
    ]
    return meek_closure(m), latent


def _finish(names, adj, sepsets, algorithm, counting, started, vars) -> DiscoveryResult:
    m, latent = _orient(names, adj, sepsets)
    g = MixedGraph(tuple(vars), MixedGraph.from_marks(names, m).edges)
    stats = {"ci_calls": counting.calls, "elapsed_s": time.perf_counter() - started}
    return DiscoveryResult(g, sepsets, latent, algorithm, stats)


class _Counting:
    def __init__(self, tester: CiTester):
        self.tester = tester
        self.alpha = tester.alpha
        self.calls = 0

    def test(self, a, b, cond):
        self.calls += 1
        return self.tester.test(a, b, cond)


def ic_algorithm(tester: CiTester, vars: Sequence[str], max_cond: int = DEFAULT_MAX_COND) -> DiscoveryResult:
    """Inductive Causation with a bounded separating-set search.

    Every pair is tested against all subsets of the other variables up to
    size ``max_cond``, smallest first and lexicographic within a size.
    """
    started = time.perf_counter()
    names = _check_vars(vars, max_cond)
    counting = _Counting(tester)
    p = len(names)
    adj = ~np.eye(p, dtype=bool)
    sepsets: dict[frozenset[str], frozenset[str]] = {}
    for a, b in combinations(range(p), 2):
        others = [names[k] for k in range(p) if k not in (a, b)]
        found = None
        for size in range(0, min(max_cond, len(others)) + 1):
            for cond in combinations(others, size):
                if _run_test(counting, names[a], names[b], cond):
                    found = frozenset(cond)
                    break
            if found is not None:
                break
        if found is not None:
            adj[a, b] = adj[b, a] = False
            sepsets[frozenset((names[a], names[b]))] = found
    return _finish(names, adj, sepsets, "ic", counting, started, vars)


def pc(tester: CiTester, vars: Sequence[str], max_cond: int = DEFAULT_MAX_COND) -> DiscoveryResult:
    """PC-stable skeleton search followed by collider orientation and Meek closure.

    At each depth the adjacency sets are frozen before any edge is removed,
    which makes the skeleton independent of the variable order.
    """
    started = time.perf_counter()
    names = _check_vars(vars, max_cond)
    counting = _Counting(tester)
    p = len(names)
    adj = ~np.eye(p, dtype=bool)
    sepsets: dict[frozenset[str], frozenset[str]] = {}
    depth = 0
    while depth <= max_cond:
        frozen = [np.flatnonzero(adj[i]).tolist() for i in range(p)]
        if all(len(nb) - 1 < depth for nb in frozen):
            break
        for i in range(p):
            for j in frozen[i]:
                if not adj[i, j]:
                    continue
                candidates = [names[k] for k in frozen[i] if k != j]
                if len(candidates) < depth:
                    continue
                for cond in combinations(candidates, depth):
                    if _run_test(counting, names[i], names[j], cond):
                        adj[i, j] = adj[j, i] = False
                        sepsets[frozenset((names[i], names[j]))] = frozenset(cond)
                        break
        depth += 1
    result = _finish(names, adj, sepsets, "pc", counting, started, vars)
    result.stats["max_depth"] = depth - 1
    return result


# ---------------------------------------------------------------------------
# score-based search

_MOVE_ORDER = {"add": 0, "delete": 1, "reverse": 2}
MIN_IMPROVEMENT = 1e-9


def _reaches(parents: dict[str, set[str]], src: str, dst: str, skip: tuple[str, str] | None = None) -> bool:
    """Directed path ``src -> ... -> dst`` (optionally ignoring edge ``skip``)."""
    children: dict[str, list[str]] = {}
    for v, pa in parents.items():
        for u in pa:
            if skip is not None and (u, v) == skip:
                continue
            children.setdefault(u, []).append(v)
    stack, seen = [src], {src}
    while stack:
        v = stack.pop()
        if v == dst:
            return True
        for c in children.get(v, ()):
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return False


def _climb(names, parents, cache, max_parents, max_iters, counter) -> tuple[float, list[float]]:
    score = {v: cache.local(v, parents[v]) for v in names}
    total = sum(score[v] for v in names)
    trajectory = [total]
    for _ in range(max_iters):
        best = None
        for s in names:
            for t in names:
                if s == t:
                    continue
                if s in parents[t]:
                    moves = [("delete", s, t), ("reverse", s, t)]
                elif t in parents[s]:
                    continue
                else:
                    moves = [("add", s, t)]
                for kind, u, v in moves:
                    if kind == "add":
                        if len(parents[v]) >= max_parents or _reaches(parents, v, u):
                            continue
                        delta = cache.local(v, parents[v] | {u}) - score[v]
                    elif kind == "delete":
                        delta = cache.local(v, parents[v] - {u}) - score[v]
                    else:
                        if len(parents[u]) >= max_parents or _reaches(parents, u, v, skip=(u, v)):
                            continue
                        delta = (cache.local(v, parents[v] - {u}) - score[v]
                                 + cache.local(u, parents[u] | {v}) - score[u])
                    counter[0] += 1
                    key = (_MOVE_ORDER[kind], u, v)
                    if delta > MIN_IMPROVEMENT and (
                        best is None or delta > best[0] or (delta == best[0] and key < best[1])
                    ):
                        best = (delta, key)
        if best is None:
            break
        kind_i, u, v = best[1]
        if kind_i == 0:
            parents[v] = parents[v] | {u}
        elif kind_i == 1:
            parents[v] = parents[v] - {u}
        else:
            parents[v] = parents[v] - {u}
            parents[u] = parents[u] | {v}
        for w in {u, v}:
            score[w] = cache.local(w, parents[w])
        total = sum(score[w] for w in names)
        trajectory.append(total)
    return total, trajectory


def hill_climb(
    ds: Dataset,
    max_parents: int = 3,
    max_iters: int = 1000,
    seed: int = 42,
    restarts: int = 0,
    cache: LocalScoreCache | None = None,
) -> DiscoveryResult:
    """Greedy BIC hill climbing over single-edge add/delete/reverse moves.

    Starts from the empty DAG and applies the best strictly improving legal
    move until none is left or ``max_iters`` moves were made.  Ties go to
    add < delete < reverse, then to the lexicographically smallest
    ``(src, dst)``.  With ``restarts > 0`` the best graph found is perturbed
    by random edge deletions/reversals and re-climbed; the seed only drives
    those perturbations.
    """
    if max_parents < 0:
        raise InputError("max_parents must be >= 0")
    if max_iters < 1:
        raise InputError("max_iters must be >= 1")
    started = time.perf_counter()
    names = sorted(ds.names)
    cache = cache if cache is not None else LocalScoreCache(BicScore(ds))
    counter = [0]
    parents = {v: frozenset() for v in names}
    total, trajectory = _climb(names, parents, cache, max_parents, max_iters, counter)
    best_parents, best_total = dict(parents), total
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        parents = dict(best_parents)
        arcs = sorted((u, v) for v in names for u in parents[v])
        if not arcs:
            break
        for k in rng.choice(len(arcs), size=max(1, len(arcs) // 3), replace=False):
            u, v = arcs[k]
            parents[v] = parents[v] - {u}
            if rng.random() < 0.5 and len(parents[u]) < max_parents and not _reaches(parents, u, v):
                parents[u] = parents[u] | {v}
        total, traj = _climb(names, parents, cache, max_parents, max_iters, counter)
        if total > best_total + MIN_IMPROVEMENT:
            best_parents, best_total, trajectory = dict(parents), total, traj
    arcs = [(u, v) for v in names for u in sorted(best_parents[v])]
    g = MixedGraph.from_arcs(tuple(ds.names), directed=arcs)
    stats = {
        "score": best_total,
        "score_name": "BIC",
        "trajectory": trajectory,
        "score_evaluations": counter[0],
        "cache_hits": cache.hits,
        "cache_misses": cache.misses,
        "elapsed_s": time.perf_counter() - started,
    }
    return DiscoveryResult(g, {}, [], "hc", stats)


def detect_latent_edges(result: DiscoveryResult | MixedGraph) -> list[tuple[str, str]]:
    """Bidirected pairs of a result graph, each pair and the list sorted by name."""
    g = result.graph if isinstance(result, DiscoveryResult) else result
    return g.edges_of_kind("bidir")


def discover(
    algorithm: str,
    ds: Dataset,
    tester: CiTester | None = None,
    max_cond: int = DEFAULT_MAX_COND,
    max_parents: int = 3,
    seed: int = 42,
    alpha: float = 0.05,
) -> DiscoveryResult:
    """Run ``algorithm`` (``ic``, ``pc`` or ``hc``) on ``ds``."""
    from .citest import make_tester
    from .data import as_continuous

    if algorithm == "hc":
        data = ds if (ds.all_continuous or ds.all_discrete) else as_continuous(ds)
        return hill_climb(data, max_parents=max_parents, seed=seed)
    if algorithm not in ("ic", "pc"):
        raise InputError(f"unknown discovery algorithm {algorithm!r}; choose from {ALGORITHMS}")
    tester = tester if tester is not None else make_tester(ds, alpha)
    fn = ic_algorithm if algorithm == "ic" else pc
    return fn(tester, ds.names, max_cond)
