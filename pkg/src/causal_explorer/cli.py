"""Command-line interface.

Exit codes: 0 success, 1 I/O failure, 2 usage or input error, 3 numerical
failure (or every ensemble cell failed).
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

from .data import load_csv, standardize, write_csv
from .discovery import ALGORITHMS, DEFAULT_MAX_COND, DiscoveryError, discover
from .ensemble import (
    EnsembleConfig,
    RunRecord,
    format_latent_report,
    latent_report,
    proxy_target,
    run_ensemble,
    sweep_features,
)
from .errors import InputError, NumericalError
from .features import SELECTORS
from .graph import from_edge_list, to_dot, to_edge_list
from .metrics import auprc, shd
from .simulate import SimSpec, random_model, sample

log = logging.getLogger("causal_explorer")

RESULTS_HEADER = [
    "run_index", "cd_algo", "fs_algo", "n_features", "features",
    "shd", "auprc", "latent_edge_count", "elapsed_ms", "error",
]

EXIT_IO, EXIT_USAGE, EXIT_NUMERIC = 1, 2, 3


class UsageError(Exception):
    pass


def _csv_list(choices):
    def parse(text: str) -> list[str]:
        items = [t.strip() for t in text.split(",") if t.strip()]
        bad = [t for t in items if t not in choices]
        if not items or bad:
            raise argparse.ArgumentTypeError(
                f"invalid choice(s) {bad or text!r}; choose from {', '.join(choices)}"
            )
        return items
    return parse


def _load_graph(path: str):
    return from_edge_list(Path(path).read_text(encoding="utf-8"), source=path)


# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    spec = SimSpec(p=args.nodes, edge_prob=args.edge_prob, coef_low=args.coef_low,
                   coef_high=args.coef_high, noise_sd=args.noise_sd, seed=args.seed)
    model = random_model(spec)
    ds = sample(model, args.samples, args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(ds, out / "data.csv")
    (out / "truth.dag").write_text(to_edge_list(model.dag), encoding="utf-8")
    print(f"simulated {ds.n} samples over {ds.p} nodes with {model.dag.n_edges} edges -> {out}")
    return 0


def cmd_discover(args) -> int:
    ds = load_csv(args.data)
    data = standardize(ds)
    result = discover(args.algo, data, max_cond=args.max_cond, max_parents=args.max_parents,
                      seed=args.seed, alpha=args.alpha)
    out = Path(args.out)
    if out.suffix in (".dot", ".dag"):
        out = out.with_suffix("")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.with_suffix(".dot").write_text(to_dot(result.graph), encoding="utf-8")
    header = f"{args.algo} result" + (" (score: BIC)" if args.algo == "hc" else "")
    out.with_suffix(".dag").write_text(to_edge_list(result.graph, header), encoding="utf-8")
    print(f"{args.algo}: {result.graph.n_edges} edges -> {out.with_suffix('.dot')}, {out.with_suffix('.dag')}")
    if result.latent_edges:
        print(f"latent edges: {result.latent_edges!r}")
    return 0


def _records_csv(records: list[RunRecord], timing: bool) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    for r in records:
        writer.writerow([
            r.run_index, r.cd_algo, r.fs_algo, r.n_features, ";".join(r.features),
            "" if r.shd is None else r.shd,
            "" if r.auprc is None else repr(float(r.auprc)),
            len(r.latent_edges), r.elapsed_ms if timing else 0, r.error,
        ])
    return buf.getvalue()


def _config(args, k=None, k_range=None) -> EnsembleConfig:
    return EnsembleConfig(fs_algos=args.fs, cd_algos=args.cd, k=k, k_range=k_range,
                          alpha=args.alpha, max_cond=args.max_cond,
                          max_parents=args.max_parents, seed=args.seed)


def _target(args, ds, config):
    if args.target:
        return _load_graph(args.target), False
    return proxy_target(ds, config), True


def _write_outputs(out: Path, records, target, proxy: bool, csv_name: str, timing: bool) -> None:
    out.mkdir(parents=True, exist_ok=True)
    graphs = out / "graphs"
    graphs.mkdir(exist_ok=True)
    (out / csv_name).write_text(_records_csv(records, timing), encoding="utf-8")
    for r in records:
        if r.graph is not None:
            (graphs / f"run_{r.run_index}.dot").write_text(to_dot(r.graph), encoding="utf-8")
            (graphs / f"run_{r.run_index}.dag").write_text(to_edge_list(r.graph), encoding="utf-8")
    (out / "latent_edges.txt").write_text(format_latent_report(latent_report(records)),
                                          encoding="utf-8")
    header = "proxy target: BIC hill-climb over all features" if proxy else "supplied target"
    (out / "target.dag").write_text(to_edge_list(target, header), encoding="utf-8")


def _summarise(records) -> int:
    ok = sum(r.ok for r in records)
    print(f"{len(records)} runs, {ok} succeeded")
    for r in records:
        if r.ok:
            print(f"  {r.run_index:>3}  {r.cd_algo:<3} {r.fs_algo:<7} k={r.n_features:<3} "
                  f"shd={r.shd:<4} auprc={r.auprc:.6f}")
        else:
            print(f"  {r.run_index:>3}  {r.cd_algo:<3} {r.fs_algo:<7} ERROR {r.error}")
    return 0 if ok else EXIT_NUMERIC


def cmd_ensemble(args) -> int:
    ds = load_csv(args.data)
    config = _config(args, k=args.k)
    target, proxy = _target(args, ds, config)
    records = run_ensemble(ds, config, target, jobs=args.jobs)
    out = Path(args.out_dir)
    _write_outputs(out, records, target, proxy, "results.csv", args.timing)
    if args.plot:
        from .plotting import plot_shd_vs_auprc

        plot_shd_vs_auprc(records, out / "shd_vs_auprc.svg")
    return _summarise(records)


def cmd_sweep(args) -> int:
    if args.k_min > args.k_max:
        raise UsageError(f"--k-min ({args.k_min}) must not exceed --k-max ({args.k_max})")
    ds = load_csv(args.data)
    config = _config(args, k_range=(args.k_min, args.k_max))
    target, proxy = _target(args, ds, config)
    records = sweep_features(ds, config, target, jobs=args.jobs)
    out = Path(args.out_dir)
    _write_outputs(out, records, target, proxy, "sweep.csv", args.timing)
    if args.plot:
        from .plotting import plot_sweep

        plot_sweep(records, out)
    return _summarise(records)


def cmd_metrics(args) -> int:
    target = _load_graph(args.target)
    candidate = _load_graph(args.candidate)
    print(f"shd={shd(target, candidate)} auprc={auprc(target, candidate):.6f}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="causal-explorer",
        description="Exploratory causal analysis: feature-selection x causal-discovery ensembles.",
        formatter_class=fmt,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="sample a random linear-Gaussian SEM", formatter_class=fmt)
    p.add_argument("--nodes", type=int, default=10)
    p.add_argument("--edge-prob", type=float, default=0.3)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--coef-low", type=float, default=0.8)
    p.add_argument("--coef-high", type=float, default=1.2)
    p.add_argument("--noise-sd", type=float, default=1.0)
    p.add_argument("--out-dir", default="sim")
    p.set_defaults(func=cmd_simulate)

    def discovery_flags(q):
        q.add_argument("--alpha", type=float, default=0.05, help="CI test significance level")
        q.add_argument("--max-cond", type=int, default=DEFAULT_MAX_COND,
                       help="largest conditioning set for ic/pc")
        q.add_argument("--max-parents", type=int, default=3, help="in-degree bound for hc")
        q.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("discover", help="run one discovery algorithm", formatter_class=fmt)
    p.add_argument("--data", required=True)
    p.add_argument("--algo", choices=ALGORITHMS, default="pc")
    discovery_flags(p)
    p.add_argument("--out", default="graph", help="output path prefix for .dot and .dag")
    p.set_defaults(func=cmd_discover)

    def ensemble_flags(q):
        q.add_argument("--data", required=True)
        q.add_argument("--target", help="true graph as an edge list; a proxy is learned if omitted")
        q.add_argument("--fs", type=_csv_list(SELECTORS), default=list(SELECTORS),
                       help="comma-separated feature selectors")
        q.add_argument("--cd", type=_csv_list(ALGORITHMS), default=["pc", "ic", "hc"],
                       help="comma-separated discovery algorithms")
        discovery_flags(q)
        q.add_argument("--jobs", type=int, default=1, help="parallel cells (output is identical for any value)")
        q.add_argument("--timing", action="store_true",
                       help="record wall-clock elapsed_ms (otherwise 0, keeping output deterministic)")
        q.add_argument("--plot", action="store_true", help="also write SVG figures")
        q.add_argument("--out-dir", default="results")

    p = sub.add_parser("ensemble", help="selector x algorithm ensemble at one k", formatter_class=fmt)
    ensemble_flags(p)
    p.add_argument("--k", type=int, default=7, help="number of features to select")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("sweep", help="ensemble over a range of k", formatter_class=fmt)
    ensemble_flags(p)
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("metrics", help="SHD and AUPRC between two edge lists", formatter_class=fmt)
    p.add_argument("--target", required=True)
    p.add_argument("--candidate", required=True)
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DiscoveryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc.__cause__, InputError) else EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
