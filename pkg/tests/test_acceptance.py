"""Acceptance suite: each test checks one headline property at its stated tolerance.

Every test reports a one-line PASS/FAIL verdict (also repeated in the
terminal summary) before asserting.
"""

from __future__ import annotations

import csv
import filecmp
import time
from itertools import combinations

import numpy as np
from scipy.stats import spearmanr

from causal_explorer.cli import main
from causal_explorer.citest import FisherZTester, fisher_z_test
from causal_explorer.data import ColumnKind, Dataset
from causal_explorer.discovery import hill_climb, ic_algorithm, pc
from causal_explorer.ensemble import EnsembleConfig, proxy_target, run_ensemble
from causal_explorer.features import (
    LINEAR,
    TREE_ENSEMBLE,
    fit_mixture,
    make_real_vs_synth,
    pfa,
    train_separator,
)
from causal_explorer.graph import MixedGraph, cpdag_of, from_dot, from_edge_list, skeleton_of
from causal_explorer.metrics import auprc, metric_table, shd
from causal_explorer.simulate import SimSpec, oracle_ci, random_dag, random_model, sample

from conftest import block_data, chain_data, chain_graph, random_mixed_graph, record_criterion

N_DAGS = 200


def _oracle_dags():
    for seed in range(N_DAGS):
        p = 2 + seed % 6
        yield random_dag(p, 0.3, seed), max(p - 2, 0)


def test_criterion_01_oracle_pc_recovers_cpdag():
    started = time.perf_counter()
    matches = sum(pc(oracle_ci(dag), dag.nodes, max_cond=m).graph == cpdag_of(dag)
                  for dag, m in _oracle_dags())
    elapsed = time.perf_counter() - started
    ok = matches == N_DAGS and elapsed < 30
    record_criterion(1, "oracle PC = CPDAG", ok, f"{matches}/{N_DAGS} match, {elapsed:.2f}s (< 30s)")
    assert ok


def test_criterion_02_ic_equals_pc_under_oracle():
    same = sum(ic_algorithm(oracle_ci(dag), dag.nodes, max_cond=m).graph
               == pc(oracle_ci(dag), dag.nodes, max_cond=m).graph
               for dag, m in _oracle_dags())
    ok = same == N_DAGS
    record_criterion(2, "IC = PC under oracle", ok, f"{same}/{N_DAGS} identical")
    assert ok


def test_criterion_03_fisher_z_null_calibration():
    started = time.perf_counter()
    rng = np.random.default_rng(2024)
    rejections = 0
    for _ in range(1000):
        ds = Dataset.continuous(["x", "y"], rng.standard_normal((2000, 2)))
        rejections += not fisher_z_test(ds, "x", "y", alpha=0.05).independent
    rate = rejections / 1000
    elapsed = time.perf_counter() - started
    ok = 0.03 <= rate <= 0.07 and elapsed < 10
    record_criterion(3, "Fisher-z calibration", ok, f"rejection rate {rate:.3f} in [0.03, 0.07], {elapsed:.2f}s (< 10s)")
    assert ok


def test_criterion_04_pc_recovers_chain_skeleton():
    started = time.perf_counter()
    truth = skeleton_of(chain_graph(5))
    hits = 0
    for seed in range(20):
        ds = chain_data(10_000, seed)
        hits += skeleton_of(pc(FisherZTester(ds, alpha=0.01), ds.names).graph) == truth
    elapsed = time.perf_counter() - started
    ok = hits >= 18 and elapsed < 60
    record_criterion(4, "PC chain skeleton", ok, f"{hits}/20 exact (>= 18), {elapsed:.2f}s (< 60s)")
    assert ok


def test_criterion_05_hill_climb_quality():
    truth = cpdag_of(chain_graph(5))
    close = increasing = 0
    for seed in range(20):
        res = hill_climb(chain_data(10_000, seed), seed=seed)
        close += shd(cpdag_of(res.graph), truth) <= 2
        traj = res.stats["trajectory"]
        increasing += all(b > a for a, b in zip(traj, traj[1:]))
    ok = close >= 16 and increasing == 20
    record_criterion(5, "hill-climb quality", ok,
                     f"CPDAG SHD <= 2 in {close}/20 (>= 16), strictly increasing score in {increasing}/20")
    assert ok


def parity_data(n: int, seed: int) -> Dataset:
    """Four fair bits plus their parity: every pair is independent, the set is not."""
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(n, 4))
    x = np.column_stack([bits, bits.sum(axis=1) % 2]).astype(float)
    return Dataset([f"b{i}" for i in range(5)], (ColumnKind.discrete(2),) * 5, x)


def test_criterion_06_separator_accuracies():
    tree_ok = linear_ok = 0
    accs = []
    for seed in range(20):
        ds = parity_data(2000, seed)
        labeled = make_real_vs_synth(ds, fit_mixture(ds, 10, seed), seed)
        tree = train_separator(labeled, TREE_ENSEMBLE, seed).holdout_accuracy
        linear = train_separator(labeled, LINEAR, seed).holdout_accuracy
        tree_ok += tree >= 0.9
        linear_ok += linear <= 0.6
        accs.append((tree, linear))
    ok = tree_ok >= 16 and linear_ok >= 16
    t_med, l_med = np.median(accs, axis=0)
    record_criterion(6, "separator accuracies", ok,
                     f"tree >= 0.9 in {tree_ok}/20 (median {t_med:.3f}), "
                     f"linear <= 0.6 in {linear_ok}/20 (median {l_med:.3f})")
    assert ok


def test_criterion_07_pfa_blocks():
    started = time.perf_counter()
    hits = 0
    for seed in range(20):
        chosen = pfa(block_data(1000, seed), 3, seed).selected
        hits += sorted(v[0] for v in chosen) == ["A", "B", "C"]
    elapsed = time.perf_counter() - started
    ok = hits >= 18 and elapsed < 10
    record_criterion(7, "PFA block selection", ok, f"{hits}/20 one-per-block (>= 18), {elapsed:.2f}s (< 10s)")
    assert ok


def confounded_data(n: int, seed: int) -> Dataset:
    """L -> A, L -> B, X -> A, Y -> B with L left out of the data."""
    rng = np.random.default_rng(seed)
    latent, x, y = rng.standard_normal((3, n))
    a = x + latent + rng.standard_normal(n)
    b = y + latent + rng.standard_normal(n)
    return Dataset.continuous(["A", "B", "X", "Y"], np.column_stack([a, b, x, y]))


def test_criterion_08_latent_flagging():
    flagged = 0
    for seed in range(20):
        ds = confounded_data(20_000, seed)
        flagged += ("A", "B") in pc(FisherZTester(ds, alpha=0.01), ds.names).latent_edges
    ok = flagged >= 14
    record_criterion(8, "latent flagging", ok, f"(A, B) flagged in {flagged}/20 (>= 14)")
    assert ok


def test_criterion_09_proxy_rank_consistency():
    rhos = []
    for seed in range(5):
        model = random_model(SimSpec(p=10, edge_prob=0.3, seed=seed))
        ds = sample(model, 2000, seed)
        config = EnsembleConfig(k=5, alpha=0.01, seed=seed)
        records = [r for r in run_ensemble(ds, config, model.dag) if r.ok]
        proxy = proxy_target(ds, config)
        true_shd = [r.shd for r in records]
        proxy_shd = [shd(proxy, r.graph) for r in records]
        rho = spearmanr(true_shd, proxy_shd).statistic
        rhos.append(0.0 if np.isnan(rho) else float(rho))
    median = float(np.median(rhos))
    ok = median >= 0.5
    record_criterion(9, "proxy rank consistency", ok,
                     f"median Spearman {median:.3f} (>= 0.5) over {[round(r, 3) for r in rhos]}")
    assert ok


def _renamed(g: MixedGraph, mapping: dict[str, str]) -> MixedGraph:
    return MixedGraph([mapping[v] for v in g.nodes],
                      [(mapping[e.a], mapping[e.b], e.mark_a, e.mark_b) for e in g.edges])


def test_criterion_10_metric_laws():
    rng = np.random.default_rng(10)
    nodes = [f"V{i}" for i in range(7)]
    violations = []
    for trial in range(100):
        g1 = random_mixed_graph(rng, nodes, density=rng.uniform(0.1, 0.7))
        g2 = random_mixed_graph(rng, nodes[: rng.integers(2, 8)], density=rng.uniform(0.1, 0.7))
        mapping = {v: f"r{perm}" for v, perm in zip(nodes, rng.permutation(len(nodes)))}
        checks = {
            "identity": shd(g1, g1) == 0 and shd(g2, g2) == 0,
            "symmetry": shd(g1, g2) == shd(g2, g1),
            "renaming": shd(_renamed(g1, mapping), _renamed(g2, mapping)) == shd(g1, g2),
            "empty": shd(g1, MixedGraph(g1.nodes)) == g1.n_edges,
            "range": 0.0 <= auprc(g1, g2) <= 1.0,
            "auprc identity": auprc(g1, g1) == 1.0,
        }
        violations += [(trial, name) for name, ok in checks.items() if not ok]
    target = random_dag(7, 0.5, 10)
    arcs = target.directed_edges()
    table = metric_table(target, [MixedGraph.from_arcs(target.nodes, directed=arcs[:i])
                                  for i in range(len(arcs) + 1)])
    shds, aucs = [t[1] for t in table], [t[2] for t in table]
    monotone = all(b < a for a, b in zip(shds, shds[1:])) and all(b >= a for a, b in zip(aucs, aucs[1:]))
    ok = not violations and monotone
    record_criterion(10, "metric laws", ok,
                     f"{len(violations)} violations over 100 pairs, monotone sequence of "
                     f"{len(arcs)} additions {'holds' if monotone else 'fails'}")
    assert ok


def _same_tree(a, b) -> bool:
    cmp = filecmp.dircmp(a, b)
    if cmp.left_only or cmp.right_only or cmp.funny_files:
        return False
    _, mismatch, errors = filecmp.cmpfiles(a, b, cmp.common_files, shallow=False)
    return not mismatch and not errors and all(_same_tree(a / d, b / d) for d in cmp.common_dirs)


def test_criterion_11_cli_end_to_end(tmp_path):
    sim = tmp_path / "sim"
    assert main(["simulate", "--nodes", "10", "--samples", "2000", "--seed", "11", "--out-dir", str(sim)]) == 0
    data = str(sim / "data.csv")
    base = ["ensemble", "--data", data, "--fs", "pfa,linear,tree,rfe", "--cd", "pc,ic,hc"]
    started = time.perf_counter()
    code = main(base + ["--jobs", "1", "--out-dir", str(tmp_path / "j1")])
    elapsed = time.perf_counter() - started
    with open(tmp_path / "j1" / "results.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    target = from_edge_list((tmp_path / "j1" / "target.dag").read_text(encoding="utf-8"))
    exact = 0
    for row in rows:
        graph = from_dot((tmp_path / "j1" / "graphs" / f"run_{row['run_index']}.dot").read_text(encoding="utf-8"))
        exact += int(row["shd"]) == shd(target, graph) and float(row["auprc"]) == auprc(target, graph)
    main(base + ["--jobs", "4", "--out-dir", str(tmp_path / "j4")])
    identical = _same_tree(tmp_path / "j1", tmp_path / "j4")
    ok = code == 0 and elapsed < 120 and len(rows) == 12 and exact == 12 and identical
    record_criterion(11, "CLI end-to-end", ok,
                     f"{len(rows)} records, {exact}/12 recomputed exactly, {elapsed:.1f}s (< 120s), "
                     f"--jobs 4 {'byte-identical' if identical else 'DIFFERS'}")
    assert ok
