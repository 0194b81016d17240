from __future__ import annotations

import math
from itertools import combinations

import numpy as np
import pytest

from causal_explorer.graph import MixedGraph, d_separated, is_acyclic
from causal_explorer.simulate import (
    LinearGaussianModel,
    SimSpec,
    linear_model,
    oracle_ci,
    random_dag,
    random_model,
    sample,
)


def test_random_dag_examples():
    one = random_dag(1, 0.5, 0)
    assert len(one.nodes) == 1 and one.n_edges == 0
    assert random_dag(6, 0.0, 1).n_edges == 0
    assert random_dag(3, 1.0, 2).n_edges == 3


@pytest.mark.parametrize("seed", range(30))
def test_random_dag_is_acyclic_and_reproducible(seed):
    g = random_dag(2 + seed % 7, 0.4, seed)
    assert is_acyclic(g)
    assert random_dag(2 + seed % 7, 0.4, seed) == g


def _single(names, arcs, coef=1.0):
    dag = MixedGraph.from_arcs(names, directed=arcs)
    return LinearGaussianModel(dag, {a: coef for a in arcs}, {v: 1.0 for v in names},
                               {v: 0.0 for v in names})


def test_isolated_node_moments():
    model = _single(["X"], [])
    for seed in range(20):
        x = sample(model, 10_000, seed).column("X")
        assert abs(x.mean()) <= 0.05
        assert abs(x.var() - 1.0) <= 0.1


def test_single_edge_correlation():
    model = _single(["X", "Y"], [("X", "Y")])
    for seed in range(20):
        ds = sample(model, 10_000, seed)
        r = np.corrcoef(ds.column("X"), ds.column("Y"))[0, 1]
        assert abs(r - 1 / math.sqrt(2)) <= 0.05


def test_one_row_sample():
    assert sample(_single(["X"], []), 1, 0).n == 1


def _brute_force_covariance(model):
    """Covariance by unrolling x = B^T x + e as a power series of total effects."""
    b = model.weight_matrix()
    p = len(b)
    total = np.eye(p)
    term = np.eye(p)
    for _ in range(p):
        term = term @ b
        total = total + term
    d = np.diag([model.noise_sd[v] ** 2 for v in model.dag.nodes])
    return total.T @ d @ total


def test_covariance_matches_brute_force_and_samples():
    model = random_model(SimSpec(p=5, edge_prob=0.5, seed=7))
    assert np.allclose(model.covariance(), _brute_force_covariance(model), atol=1e-12)
    deltas = []
    for seed in range(20):
        ds = sample(model, 10_000, seed)
        deltas.append(np.abs(np.cov(ds.values, rowvar=False) - model.covariance()).max())
    # entrywise median of the max deviation, coefficients here reach 1.2
    assert np.median(deltas) <= 0.05 * max(1.0, np.abs(model.covariance()).max())


def test_sampling_is_bit_reproducible():
    model = random_model(SimSpec(p=6, seed=3))
    a = sample(model, 500, 11)
    b = sample(model, 500, 11)
    assert a == b and a.values.tobytes() == b.values.tobytes()


def test_coefficients_within_bounds():
    model = linear_model(random_dag(8, 0.6, 5), seed=5, coef_low=0.8, coef_high=1.2)
    for w in model.coefficients.values():
        assert 0.8 <= abs(w) <= 1.2


def test_oracle_examples():
    chain = MixedGraph.from_arcs("XYZ", directed=[("X", "Y"), ("Y", "Z")])
    assert oracle_ci(chain).test("X", "Z", {"Y"}).independent
    collider = MixedGraph.from_arcs("XYZ", directed=[("X", "Z"), ("Y", "Z")])
    res = oracle_ci(collider).test("X", "Y", set())
    assert res.independent and res.p_value == 1.0
    for s in [(), ("Z",)]:
        res = oracle_ci(chain).test("X", "Y", s)
        assert not res.independent and res.p_value == 0.0


def test_oracle_agrees_with_d_separation():
    g = random_dag(6, 0.4, 9)
    oracle = oracle_ci(g)
    for x, y in combinations(g.nodes, 2):
        rest = [v for v in g.nodes if v not in (x, y)]
        for z in combinations(rest, 2):
            assert oracle.test(x, y, z).independent == d_separated(g, x, y, z)
            assert oracle.test(y, x, z).independent == oracle.test(x, y, z).independent
