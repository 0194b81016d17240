"""Ground-truth simulation: random DAGs, linear-Gaussian SEMs and a CI oracle.

Randomness comes from :func:`numpy.random.default_rng` (PCG64 bit generator,
seeded with the integer seed); Gaussian draws use NumPy's ziggurat
``standard_normal`` transform of that stream.  Both are fixed algorithms, so
a seed reproduces graphs and datasets bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .citest import CiResult, _check_alpha
from .data import Dataset
from .errors import InputError
from .graph import MixedGraph, d_separated, is_dag, topological_order


def node_names(p: int, prefix: str = "X") -> list[str]:
    """``X1..Xp`` zero-padded so that lexicographic order is numeric order."""
    width = len(str(p))
    return [f"{prefix}{i:0{width}d}" for i in range(1, p + 1)]


def random_dag(p: int, edge_prob: float, seed: int, names: list[str] | None = None) -> MixedGraph:
    """Random DAG: shuffle the nodes, keep each forward pair with ``edge_prob``."""
    if p < 1:
        raise InputError("p must be >= 1")
    if not 0.0 <= edge_prob <= 1.0:
        raise InputError("edge_prob must lie in [0, 1]")
    names = list(names) if names is not None else node_names(p)
    if len(names) != p:
        raise InputError("names must have length p")
    rng = np.random.default_rng(seed)
    order = rng.permutation(p)
    arcs = []
    for a in range(p):
        for b in range(a + 1, p):
            if rng.random() < edge_prob:
                arcs.append((names[order[a]], names[order[b]]))
    return MixedGraph.from_arcs(names, directed=arcs)


@dataclass(frozen=True)
class SimSpec:
    p: int
    edge_prob: float = 0.3
    coef_low: float = 0.8
    coef_high: float = 1.2
    noise_sd: float = 1.0
    seed: int = 42

    def __post_init__(self):
        if self.p < 1:
            raise InputError("p must be >= 1")
        if not 0 < self.coef_low <= self.coef_high:
            raise InputError("need 0 < coef_low <= coef_high")
        if self.noise_sd <= 0:
            raise InputError("noise_sd must be positive")


@dataclass(frozen=True)
class LinearGaussianModel:
    dag: MixedGraph
    coefficients: dict[tuple[str, str], float]
    noise_sd: dict[str, float]
    intercepts: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not is_dag(self.dag):
            raise InputError("model graph must be a DAG")
        arcs = set(self.dag.directed_edges())
        if set(self.coefficients) != arcs:
            raise InputError("coefficients must be given for exactly the DAG's edges")
        for v in self.dag.nodes:
            if self.noise_sd.get(v, 0.0) <= 0:
                raise InputError(f"noise_sd for {v!r} must be positive")

    def weight_matrix(self) -> np.ndarray:
        """``B[i, j]`` = coefficient of parent ``i`` in the equation for ``j``."""
        idx = {v: k for k, v in enumerate(self.dag.nodes)}
        b = np.zeros((len(idx), len(idx)))
        for (s, t), w in self.coefficients.items():
            b[idx[s], idx[t]] = w
        return b

    def covariance(self) -> np.ndarray:
        """Analytic covariance ``(I - B)^-T D (I - B)^-1`` in node order."""
        b = self.weight_matrix()
        inv = np.linalg.inv(np.eye(len(b)) - b)
        d = np.diag([self.noise_sd[v] ** 2 for v in self.dag.nodes])
        return inv.T @ d @ inv


def random_model(spec: SimSpec) -> LinearGaussianModel:
    dag = random_dag(spec.p, spec.edge_prob, spec.seed)
    return linear_model(dag, spec.seed, spec.coef_low, spec.coef_high, spec.noise_sd)


def linear_model(dag: MixedGraph, seed: int, coef_low: float = 0.8, coef_high: float = 1.2,
                 noise_sd: float = 1.0) -> LinearGaussianModel:
    """Coefficients uniform in ``[coef_low, coef_high]`` with a random sign."""
    rng = np.random.default_rng([seed, 1])
    coefs = {}
    for s, t in dag.directed_edges():
        sign = 1.0 if rng.random() < 0.5 else -1.0
        coefs[(s, t)] = sign * rng.uniform(coef_low, coef_high)
    sd = {v: float(noise_sd) for v in dag.nodes}
    return LinearGaussianModel(dag, coefs, sd, {v: 0.0 for v in dag.nodes})


def sample(model: LinearGaussianModel, n: int, seed: int) -> Dataset:
    """Ancestral sampling in topological order."""
    if n < 1:
        raise InputError("n must be >= 1")
    dag = model.dag
    rng = np.random.default_rng(seed)
    names = list(dag.nodes)
    idx = {v: k for k, v in enumerate(names)}
    noise = rng.standard_normal((n, len(names)))
    x = np.zeros((n, len(names)))
    for v in topological_order(dag):
        k = idx[v]
        col = model.intercepts.get(v, 0.0) + model.noise_sd[v] * noise[:, k]
        for u in sorted(dag.parents(v)):
            col = col + model.coefficients[(u, v)] * x[:, idx[u]]
        x[:, k] = col
    return Dataset.continuous(names, x)


class OracleTester:
    """CI 'test' that answers with d-separation in a known DAG."""

    def __init__(self, dag: MixedGraph, alpha: float = 0.05):
        if not is_dag(dag):
            raise InputError("oracle needs a DAG")
        self.dag = dag
        self.alpha = _check_alpha(alpha)
        self.calls = 0
        self._cache: dict[tuple, bool] = {}

    def test(self, i: str, j: str, cond: Iterable[str] = ()) -> CiResult:
        cond = frozenset(cond)
        key = (min(i, j), max(i, j), cond)
        self.calls += 1
        sep = self._cache.get(key)
        if sep is None:
            sep = d_separated(self.dag, i, j, cond)
            self._cache[key] = sep
        p = 1.0 if sep else 0.0
        return CiResult(statistic=0.0 if sep else float("inf"), p_value=p, independent=sep,
                        cond_size=len(cond))


def oracle_ci(dag: MixedGraph, alpha: float = 0.05) -> OracleTester:
    return OracleTester(dag, alpha)
