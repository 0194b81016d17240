"""Feature-selection x causal-discovery ensemble.

For every feature selector the top-``k`` features are chosen once, then
every discovery algorithm is run on that subset.  Each resulting graph is
padded to the target's nodes and scored with SHD and AUPRC.  When no target
graph is supplied, a BIC hill-climb over all features serves as a proxy.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .data import Dataset, as_continuous, select_columns, standardize
from .discovery import ALGORITHMS, DEFAULT_MAX_COND, discover, hill_climb
from .errors import InputError
from .features import SELECTORS, labeled_dataset, select_features
from .graph import MixedGraph, pad_to_nodes
from .metrics import auprc, shd

log = logging.getLogger(__name__)

DISPLAY_NAMES = {
    "pfa": "Principal Feature Analysis",
    "linear": "Linear Separator",
    "tree": "Tree Ensemble",
    "rfe": "Recursive Feature Elimination",
    "ic": "IC",
    "pc": "PC",
    "hc": "Hill Climbing (BIC)",
}


@dataclass(frozen=True)
class EnsembleConfig:
    fs_algos: tuple[str, ...] = SELECTORS
    cd_algos: tuple[str, ...] = ("pc", "ic", "hc")
    k: int | None = 5
    k_range: tuple[int, int] | None = None
    alpha: float = 0.05
    max_cond: int = DEFAULT_MAX_COND
    max_parents: int = 3
    seed: int = 42

    def __post_init__(self):
        object.__setattr__(self, "fs_algos", tuple(self.fs_algos))
        object.__setattr__(self, "cd_algos", tuple(self.cd_algos))
        if not self.fs_algos or not self.cd_algos:
            raise InputError("need at least one feature selector and one discovery algorithm")
        for name in self.fs_algos:
            if name not in SELECTORS:
                raise InputError(f"unknown feature selector {name!r}; choose from {SELECTORS}")
        for name in self.cd_algos:
            if name not in ALGORITHMS:
                raise InputError(f"unknown discovery algorithm {name!r}; choose from {ALGORITHMS}")
        if self.k_range is not None:
            lo, hi = self.k_range
            if lo < 1 or hi < lo:
                raise InputError(f"invalid k range {lo}..{hi}")
        elif self.k is None or self.k < 1:
            raise InputError("k must be >= 1")
        if not 0 < self.alpha < 1:
            raise InputError("alpha must lie in (0, 1)")

    def k_values(self) -> list[int]:
        if self.k_range is not None:
            return list(range(self.k_range[0], self.k_range[1] + 1))
        return [self.k]


@dataclass
class RunRecord:
    run_index: int
    cd_algo: str
    fs_algo: str
    n_features: int
    features: tuple[str, ...]
    graph: MixedGraph | None
    shd: int | None
    auprc: float | None
    latent_edges: list[tuple[str, str]] = field(default_factory=list)
    elapsed_ms: int = 0
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


def _prepare(ds: Dataset) -> Dataset:
    """Standardise, and treat mixed-kind data as continuous."""
    if not (ds.all_continuous or ds.all_discrete):
        ds = as_continuous(ds)
    return standardize(ds)


def proxy_target(ds: Dataset, config: EnsembleConfig) -> MixedGraph:
    """Hill-climbed DAG over all features, used when no true graph is known."""
    return hill_climb(_prepare(ds), max_parents=config.max_parents, seed=config.seed).graph


def _run_cell(ds: Dataset, features: tuple[str, ...], cd: str, config: EnsembleConfig,
              seed: int) -> tuple[MixedGraph, list]:
    sub = select_columns(ds, features)
    result = discover(cd, sub, max_cond=config.max_cond, max_parents=config.max_parents,
                      seed=seed, alpha=config.alpha)
    return result.graph, list(result.latent_edges)


def _cell_job(args):
    ds, features, cd, config, seed = args
    started = time.perf_counter()
    try:
        graph, latent = _run_cell(ds, features, cd, config, seed)
        error = ""
    except Exception as exc:  # noqa: BLE001 - one failing cell must not stop the run
        graph, latent, error = None, [], f"{type(exc).__name__}: {exc}"
    return graph, latent, int(round(1000 * (time.perf_counter() - started))), error


def _select_all(ds: Dataset, config: EnsembleConfig, k: int, labeled) -> dict[str, tuple | str]:
    subsets: dict[str, tuple | str] = {}
    for fs in config.fs_algos:
        try:
            ranking = select_features(fs, ds, min(k, ds.p), config.seed, labeled)
            subsets[fs] = ranking.selected
        except Exception as exc:  # noqa: BLE001
            subsets[fs] = f"{type(exc).__name__}: {exc}"
    return subsets


def run_ensemble(ds: Dataset, config: EnsembleConfig, target: MixedGraph | None = None,
                 jobs: int = 1, *, _k: int | None = None, _start: int = 0,
                 _labeled=None) -> list[RunRecord]:
    """One record per (selector, algorithm) pair, in config order.

    Records are scored against ``target``, or against :func:`proxy_target`
    when it is None.  A cell that raises is kept with its ``error`` set.
    Discovery in cell ``i`` is seeded with ``config.seed + i``.
    """
    data = _prepare(ds)
    if target is None:
        target = proxy_target(ds, config)
    k = _k if _k is not None else config.k_values()[0]
    labeled = _labeled
    if labeled is None and any(fs != "pfa" for fs in config.fs_algos) and data.p > 1:
        labeled = labeled_dataset(data, config.seed)
    subsets = _select_all(data, config, k, labeled)

    cells = []
    for fs in config.fs_algos:
        for cd in config.cd_algos:
            cells.append((fs, cd))
    jobs_args = []
    for i, (fs, cd) in enumerate(cells):
        sel = subsets[fs]
        if isinstance(sel, str):
            jobs_args.append(None)
        else:
            jobs_args.append((data, sel, cd, config, config.seed + _start + i))
    runnable = [a for a in jobs_args if a is not None]
    if jobs > 1 and len(runnable) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outputs = iter(list(pool.map(_cell_job, runnable)))
    else:
        outputs = iter([_cell_job(a) for a in runnable])

    records = []
    for i, ((fs, cd), args) in enumerate(zip(cells, jobs_args)):
        idx = _start + i
        if args is None:
            records.append(RunRecord(idx, cd, fs, 0, (), None, None, None,
                                     error=f"feature selection failed: {subsets[fs]}"))
            continue
        graph, latent, ms, error = next(outputs)
        features = args[1]
        if error:
            records.append(RunRecord(idx, cd, fs, len(features), features, None, None, None,
                                     elapsed_ms=ms, error=error))
            continue
        padded = _pad_for(graph, target)
        records.append(RunRecord(idx, cd, fs, len(features), features, padded,
                                 shd(target, padded), auprc(target, padded), latent, ms))
        log.debug("run %d %s/%s shd=%s", idx, fs, cd, records[-1].shd)
    return records


def _pad_for(graph: MixedGraph, target: MixedGraph) -> MixedGraph:
    nodes = list(target.nodes) + [v for v in graph.nodes if v not in target]
    return pad_to_nodes(graph, nodes)


def sweep_features(ds: Dataset, config: EnsembleConfig, target: MixedGraph | None = None,
                   jobs: int = 1) -> list[RunRecord]:
    """:func:`run_ensemble` for every ``k`` in ``config.k_range``; indices continue across k."""
    if target is None:
        target = proxy_target(ds, config)
    data = _prepare(ds)
    labeled = None
    if any(fs != "pfa" for fs in config.fs_algos) and data.p > 1:
        labeled = labeled_dataset(data, config.seed)
    records: list[RunRecord] = []
    for k in config.k_values():
        records.extend(run_ensemble(ds, config, target, jobs, _k=k, _start=len(records),
                                    _labeled=labeled))
    return records


def latent_report(records: list[RunRecord]) -> list[tuple[int, list[tuple[str, str]]]]:
    return [(r.run_index, sorted(r.latent_edges)) for r in records if r.latent_edges]


def format_latent_report(report) -> str:
    return "".join(f"run_{idx}: {pairs!r}\n" for idx, pairs in report)
