from __future__ import annotations

import csv
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from causal_explorer.cli import RESULTS_HEADER, main
from causal_explorer.data import Dataset, write_csv
from causal_explorer.graph import MixedGraph, cpdag_of, from_dot, from_edge_list, is_acyclic, to_edge_list

from conftest import chain_data, chain_graph


@pytest.fixture(scope="module")
def sim_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("sim")
    assert main(["simulate", "--nodes", "8", "--samples", "600", "--seed", "5", "--out-dir", str(out)]) == 0
    return out


def test_simulate_outputs(tmp_path, capsys):
    out = tmp_path / "a"
    assert main(["simulate", "--nodes", "10", "--edge-prob", "0.3", "--samples", "2000",
                 "--seed", "42", "--out-dir", str(out)]) == 0
    assert "10 nodes" in capsys.readouterr().out
    g = from_edge_list((out / "truth.dag").read_text())
    assert len(g.nodes) == 10 and is_acyclic(g)
    again = tmp_path / "b"
    main(["simulate", "--nodes", "10", "--edge-prob", "0.3", "--samples", "2000",
          "--seed", "42", "--out-dir", str(again)])
    for name in ("data.csv", "truth.dag"):
        assert (out / name).read_bytes() == (again / name).read_bytes()


def test_simulate_without_edges(tmp_path):
    main(["simulate", "--nodes", "10", "--edge-prob", "0", "--samples", "50", "--out-dir", str(tmp_path)])
    lines = (tmp_path / "truth.dag").read_text().splitlines()
    assert sum(l.startswith("node\t") for l in lines) == 10
    assert sum(1 for l in lines if l and not l.startswith(("node\t", "#"))) == 0


def test_discover_pc_on_chain(tmp_path):
    write_csv(chain_data(3000, 0), tmp_path / "chain.csv")
    assert main(["discover", "--data", str(tmp_path / "chain.csv"), "--algo", "pc",
                 "--alpha", "0.01", "--out", str(tmp_path / "g")]) == 0
    dot = (tmp_path / "g.dot").read_text()
    assert dot.count("dir=none") == 4
    assert from_dot(dot) == cpdag_of(chain_graph(5))
    assert from_edge_list((tmp_path / "g.dag").read_text()) == from_dot(dot)


def test_discover_hc_on_noise(tmp_path):
    empty = 0
    for seed in range(20):
        x = np.random.default_rng(seed).standard_normal((2000, 4))
        write_csv(Dataset.continuous(list("ABCD"), x), tmp_path / "noise.csv")
        main(["discover", "--data", str(tmp_path / "noise.csv"), "--algo", "hc", "--out", str(tmp_path / "n")])
        empty += "->" not in (tmp_path / "n.dot").read_text()
    assert empty >= 16


def test_bad_flags_exit_2(tmp_path, capsys):
    with pytest.raises(SystemExit) as info:
        main(["discover", "--data", "x.csv", "--algo", "fges"])
    assert info.value.code == 2
    assert "usage" in capsys.readouterr().err
    with pytest.raises(SystemExit) as info:
        main(["ensemble", "--data", "x.csv", "--fs", "pfa,boruta"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--no-such-flag"])
    assert info.value.code == 2


def test_missing_file_is_io_error(tmp_path):
    assert main(["discover", "--data", str(tmp_path / "absent.csv")]) == 1


def test_bad_csv_is_input_error(tmp_path):
    (tmp_path / "bad.csv").write_text("a,b\n1,\n")
    assert main(["discover", "--data", str(tmp_path / "bad.csv")]) == 2


def test_ensemble_outputs(sim_dir, tmp_path):
    out = tmp_path / "ens"
    code = main(["ensemble", "--data", str(sim_dir / "data.csv"), "--fs", "pfa,linear",
                 "--cd", "pc,hc", "--k", "5", "--out-dir", str(out), "--plot"])
    assert code == 0
    with open(out / "results.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == RESULTS_HEADER
    assert len(rows) == 5
    assert (out / "target.dag").read_text().startswith("# proxy")
    for row in rows[1:]:
        rec = dict(zip(RESULTS_HEADER, row))
        assert len(rec["features"].split(";")) == int(rec["n_features"]) == 5
        assert (out / "graphs" / f"run_{rec['run_index']}.dot").exists()
        assert rec["elapsed_ms"] == "0"
    ET.parse(out / "shd_vs_auprc.svg")


def test_ensemble_with_supplied_target(sim_dir, tmp_path):
    out = tmp_path / "ens"
    main(["ensemble", "--data", str(sim_dir / "data.csv"), "--target", str(sim_dir / "truth.dag"),
          "--fs", "pfa", "--cd", "pc", "--k", "4", "--out-dir", str(out)])
    assert (out / "target.dag").read_text().startswith("# supplied")
    assert from_edge_list((out / "target.dag").read_text()) == from_edge_list((sim_dir / "truth.dag").read_text())


def test_sweep_with_plots(sim_dir, tmp_path):
    out = tmp_path / "sw"
    assert main(["sweep", "--data", str(sim_dir / "data.csv"), "--k-min", "6", "--k-max", "8",
                 "--fs", "pfa,linear", "--cd", "pc,hc", "--plot", "--out-dir", str(out)]) == 0
    with open(out / "sweep.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 12 and {r["n_features"] for r in rows} == {"6", "7", "8"}
    ids = {f"series-{fs}-{cd}" for fs in ("pfa", "linear") for cd in ("pc", "hc")}
    for name in ("shd_vs_k.svg", "auprc_vs_k.svg", "shd_vs_auprc.svg"):
        root = ET.parse(out / name).getroot()
        gids = [el.get("id") for el in root.iter() if (el.get("id") or "").startswith("series-")]
        assert sorted(gids) == sorted(ids)


def test_sweep_rejects_inverted_range(sim_dir, tmp_path, capsys):
    assert main(["sweep", "--data", str(sim_dir / "data.csv"), "--k-min", "5", "--k-max", "4",
                 "--out-dir", str(tmp_path)]) == 2
    assert "k-min" in capsys.readouterr().err


def test_metrics_command(tmp_path, capsys):
    target = MixedGraph.from_arcs("ABCD", directed=[("A", "B"), ("B", "C"), ("C", "D")])
    (tmp_path / "t.dag").write_text(to_edge_list(target))
    (tmp_path / "e.dag").write_text(to_edge_list(MixedGraph(target.nodes)))
    (tmp_path / "bad.dag").write_text("node\tA\nA\tB\n")
    assert main(["metrics", "--target", str(tmp_path / "t.dag"), "--candidate", str(tmp_path / "t.dag")]) == 0
    assert capsys.readouterr().out.strip() == "shd=0 auprc=1.000000"
    main(["metrics", "--target", str(tmp_path / "t.dag"), "--candidate", str(tmp_path / "e.dag")])
    assert capsys.readouterr().out.strip() == "shd=3 auprc=0.000000"
    assert main(["metrics", "--target", str(tmp_path / "t.dag"), "--candidate", str(tmp_path / "bad.dag")]) == 2
    err = capsys.readouterr().err
    assert "bad.dag" in err and "line 2" in err


def test_help_lists_defaults():
    out = subprocess.run([sys.executable, "-m", "causal_explorer", "ensemble", "--help"],
                         capture_output=True, text=True, check=True).stdout
    assert "default: 7" in out and "--jobs" in out
