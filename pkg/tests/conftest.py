from __future__ import annotations

from itertools import combinations, product

import numpy as np
import pytest

from causal_explorer.data import Dataset
from causal_explorer.graph import MixedGraph, is_acyclic


def chain_graph(p: int = 5, prefix: str = "X") -> MixedGraph:
    names = [f"{prefix}{i}" for i in range(1, p + 1)]
    return MixedGraph.from_arcs(names, directed=list(zip(names, names[1:])))


def chain_data(n: int, seed: int, p: int = 5, coef: float = 1.0) -> Dataset:
    rng = np.random.default_rng(seed)
    x = np.zeros((n, p))
    x[:, 0] = rng.standard_normal(n)
    for j in range(1, p):
        x[:, j] = coef * x[:, j - 1] + rng.standard_normal(n)
    return Dataset.continuous([f"X{i}" for i in range(1, p + 1)], x)


def _descendants(g: MixedGraph, v: str) -> set[str]:
    out, stack = set(), [v]
    while stack:
        u = stack.pop()
        for c in g.children(u):
            if c not in out:
                out.add(c)
                stack.append(c)
    return out


def brute_force_d_separated(g: MixedGraph, x: str, y: str, z) -> bool:
    """Enumerate every simple path of the skeleton and apply the blocking rules."""
    z = set(z)

    def paths(cur, target, visited):
        if cur == target:
            yield list(visited)
            return
        for nb in sorted(g.adjacent(cur)):
            if nb not in visited:
                visited.append(nb)
                yield from paths(nb, target, visited)
                visited.pop()

    for path in paths(x, y, [x]):
        blocked = False
        for k in range(1, len(path) - 1):
            u, v, w = path[k - 1], path[k], path[k + 1]
            collider = g.is_directed(u, v) and g.is_directed(w, v)
            if collider:
                if v not in z and not (_descendants(g, v) & z):
                    blocked = True
            elif v in z:
                blocked = True
            if blocked:
                break
        if not blocked:
            return False
    return True


def all_dags(nodes) -> list[MixedGraph]:
    """Every DAG on ``nodes`` (each pair: absent, forward or backward)."""
    pairs = list(combinations(nodes, 2))
    out = []
    for states in product((0, 1, 2), repeat=len(pairs)):
        arcs = [(a, b) if s == 1 else (b, a) for (a, b), s in zip(pairs, states) if s]
        g = MixedGraph.from_arcs(nodes, directed=arcs)
        if is_acyclic(g):
            out.append(g)
    return out


@pytest.fixture
def sprinkler() -> MixedGraph:
    nodes = ["geographic position", "Earth's tilt", "season", "sprinkler", "rain", "wet"]
    return MixedGraph.from_arcs(nodes, directed=[
        ("geographic position", "season"), ("Earth's tilt", "season"),
        ("season", "sprinkler"), ("season", "rain"),
        ("sprinkler", "wet"), ("rain", "wet"),
    ])


def random_mixed_graph(rng: np.random.Generator, nodes, density: float = 0.4) -> MixedGraph:
    """Random graph over ``nodes`` using directed, undirected and bidirected edges."""
    directed, undirected, bidirected = [], [], []
    for a, b in combinations(nodes, 2):
        if rng.random() >= density:
            continue
        kind = rng.integers(0, 4)
        if kind == 0:
            directed.append((a, b))
        elif kind == 1:
            directed.append((b, a))
        elif kind == 2:
            undirected.append((a, b))
        else:
            bidirected.append((a, b))
    return MixedGraph.from_arcs(nodes, directed=directed, undirected=undirected, bidirected=bidirected)


def brute_force_shd(g1: MixedGraph, g2: MixedGraph) -> int:
    """Compare ordered mark pairs over every unordered pair of the node union."""
    nodes = sorted(set(g1.nodes) | set(g2.nodes))

    def state(g, a, b):
        if a in g.nodes and b in g.nodes and g.has_edge(a, b):
            return g.marks(a, b)
        return None

    return sum(state(g1, a, b) != state(g2, a, b) for a, b in combinations(nodes, 2))


def block_data(n: int, seed: int, noise: float = 0.3) -> Dataset:
    """Three latent blocks (A, B, C), each driving three noisy observed copies."""
    rng = np.random.default_rng(seed)
    cols, names = [], []
    for block in "ABC":
        latent = rng.standard_normal(n)
        for i in range(3):
            cols.append(latent + noise * rng.standard_normal(n))
            names.append(f"{block}{i}")
    return Dataset.continuous(names, np.column_stack(cols))


# acceptance verdicts, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, passed: bool, detail: str) -> None:
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
