import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from icsketch.cli import build_parser, main
from icsketch.graph import preferential_attachment, write_csr, write_edge_list

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def path_graph(tmp_path):
    p = tmp_path / "path.txt"
    p.write_text("0 1\n1 2\n2 3\n3 4\n")
    return str(p)


@pytest.fixture
def small_graph(tmp_path):
    p = tmp_path / "ba.txt"
    write_edge_list(preferential_attachment(60, 2, seed=3), p)
    return str(p)


def strip_timings(report):
    report = dict(report)
    report.pop("timings")
    return report


@pytest.mark.parametrize("method", ["exhaustive", "celf", "ptree", "wintree"])
def test_path_full_probability(capsys, path_graph, method):
    code, out, err = run(capsys, "run", "--graph", path_graph, "--p", "1", "--k", "1", "--R", "4", "--method", method)
    assert code == 0
    rep = json.loads(out)
    assert rep["seeds"] == [0] and rep["gains"] == [5.0] and rep["gain_sums"] == [20]
    assert "sketch memory estimate" in err


def test_report_schema(capsys, small_graph):
    code, out, _ = run(capsys, "run", "--graph", small_graph, "--k", "5", "--R", "16", "--alpha", "0.5", "--p", "0.2", "--mc-rounds", "200")
    rep = json.loads(out)
    assert set(rep) == {
        "version", "graph", "config", "seeds", "gain_sums", "gains", "spread_estimate",
        "evaluations", "sketch_bytes", "timings", "mc",
    }
    assert rep["graph"] == {"path": small_graph, "n": 60, "m": rep["graph"]["m"]}
    ev = rep["evaluations"]
    assert ev["initial"] == 60 and len(ev["per_round"]) == 5
    assert ev["total"] == ev["initial"] + sum(ev["per_round"])
    assert set(ev["bfs_visits"]) == {"initial", "selection", "mark_seed", "total"}
    assert rep["sketch_bytes"] == 16 * 30 * 2 * 8 + 8
    assert set(rep["timings"]) == {"sketch_s", "select_s"}
    assert rep["mc"]["rounds"] == 200
    assert rep["config"]["model"] == {"type": "constant", "p": 0.2}


def test_report_deterministic(capsys, small_graph):
    args = ["run", "--graph", small_graph, "--k", "8", "--R", "16", "--alpha", "0.2", "--wic", "--rng-seed", "5"]
    a = json.loads(run(capsys, *args)[1])
    b = json.loads(run(capsys, *args)[1])
    assert json.dumps(strip_timings(a), sort_keys=True) == json.dumps(strip_timings(b), sort_keys=True)
    # the rng seed only moves the centers, which never changes an answer
    c = json.loads(run(capsys, *args[:-1], "6")[1])
    assert c["seeds"] == a["seeds"] and c["gain_sums"] == a["gain_sums"]
    assert c["evaluations"]["bfs_visits"] != a["evaluations"]["bfs_visits"]


def test_bundled_graph_celf_vs_wintree(capsys):
    g = str(DATA / "ba_10k.txt")
    seeds = {}
    for method in ("celf", "wintree"):
        code, out, _ = run(capsys, "run", "--graph", g, "--k", "20", "--R", "32", "--alpha", "0.1", "--method", method)
        assert code == 0
        seeds[method] = json.loads(out)["seeds"]
    assert seeds["celf"] == seeds["wintree"] and len(seeds["celf"]) == 20


def test_csv_and_human(capsys, small_graph):
    code, out, _ = run(capsys, "run", "--graph", small_graph, "--k", "3", "--R", "8", "--output", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["rank"] for r in rows] == ["1", "2", "3"]
    assert set(rows[0]) == {"rank", "seed", "gain", "gain_sum", "evaluations"}
    code, out, _ = run(capsys, "run", "--graph", small_graph, "--k", "3", "--R", "8", "--output", "human", "--mc-rounds", "50")
    assert code == 0 and out.startswith("graph") and "MC spread" in out


def test_csr_input(capsys, tmp_path):
    g = preferential_attachment(40, 2, seed=1)
    write_csr(g, tmp_path / "g.csr")
    write_edge_list(g, tmp_path / "g.txt")
    a = json.loads(run(capsys, "run", "--graph", str(tmp_path / "g.csr"), "--format", "csr", "--k", "4", "--R", "8")[1])
    b = json.loads(run(capsys, "run", "--graph", str(tmp_path / "g.txt"), "--k", "4", "--R", "8")[1])
    assert a["seeds"] == b["seeds"]


def test_verify_passes_on_bundled_graph(capsys):
    code, out, _ = run(capsys, "verify", "--graph", str(DATA / "er_40.txt"), "--k", "5", "--R", "16", "--p", "0.2", "--output", "human")
    assert code == 0
    assert out.count("[PASS]") == 4 and out.strip().endswith("verify: PASS")


def test_verify_json(capsys, small_graph):
    code, out, _ = run(capsys, "verify", "--graph", small_graph, "--k", "4", "--R", "8", "--uniform", "0", "0.3")
    rep = json.loads(out)
    assert code == 0 and rep["passed"]
    assert [c["name"] for c in rep["checks"]] == [
        "four-way-agreement", "ptree-evaluation-bound", "compression-transparency", "mc-cross-check",
    ]


def test_verify_detects_injected_fault(capsys, small_graph):
    code, out, _ = run(capsys, "verify", "--graph", small_graph, "--k", "3", "--R", "8", "--output", "human", "--inject-fault")
    assert code == 1
    assert "[FAIL] compression-transparency" in out


def test_inject_fault_is_hidden():
    assert "inject" not in build_parser().format_help()


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--graph", "PATH", "--k", "6"],
        ["run", "--graph", "PATH", "--k", "0"],
        ["run", "--graph", "PATH", "--alpha", "1.5"],
        ["run", "--graph", "PATH", "--R", "0"],
        ["run", "--graph", "PATH", "--p", "2"],
        ["run", "--graph", "PATH", "--uniform", "0.5", "0.1"],
        ["run", "--graph", "PATH", "--method", "magic"],
        ["run", "--graph", "PATH", "--threads", "0"],
        ["run", "--graph", "/no/such/file"],
        ["run", "--graph", "PATH", "--format", "csr"],
        ["verify", "--graph", "PATH", "--k", "99"],
        ["bench", "--graph", "PATH", "--alphas", "1,x"],
        ["bench", "--graph", "PATH", "--methods", "celf,magic"],
        ["bench", "--graph", "PATH", "--alphas", "2"],
    ],
)
def test_usage_errors(capsys, path_graph, argv):
    argv = [path_graph if a == "PATH" else a for a in argv]
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "icsketch: error" in err


@pytest.mark.parametrize("argv", [["run"], ["run", "--graph", "x", "--p", "0.1", "--wic"], ["fly"]])
def test_argparse_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_malformed_graph_is_usage_error(capsys, tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("0 1\nfoo bar\n")
    code, _, err = run(capsys, "run", "--graph", str(p), "--k", "1")
    assert code == 2 and "line 2" in err


def test_bench(capsys):
    g = str(DATA / "ba_10k.txt")
    code, out, _ = run(capsys, "bench", "--graph", g, "--k", "10", "--R", "16", "--alphas", "1,0.1", "--methods", "celf,wintree")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["alpha"], r["method"]) for r in rows] == [("1.0", "celf"), ("1.0", "wintree"), ("0.1", "celf"), ("0.1", "wintree")]
    by = {(float(r["alpha"]), r["method"]): r for r in rows}
    n = 10_000
    for m in ("celf", "wintree"):
        full, tenth = by[(1.0, m)], by[(0.1, m)]
        assert int(full["bytes"]) == 16 * n * 16 + n // 8
        assert int(tenth["bytes"]) == 16 * (n // 10) * 16 + n // 8
        assert int(full["evals"]) <= int(tenth["evals"])
        assert int(full["bfs_visits"]) < int(tenth["bfs_visits"])


def test_bench_bytes_monotone_in_alpha(capsys, small_graph):
    code, out, _ = run(capsys, "bench", "--graph", small_graph, "--k", "3", "--R", "4", "--alphas", "0,0.1,0.5,1", "--methods", "ptree")
    b = [int(r["bytes"]) for r in csv.DictReader(io.StringIO(out))]
    assert b == sorted(b) and b[0] < b[-1]


def test_module_entry_point(path_graph):
    proc = subprocess.run(
        [sys.executable, "-m", "icsketch", "run", "--graph", path_graph, "--k", "9"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    proc = subprocess.run(
        [sys.executable, "-m", "icsketch", "run", "--graph", path_graph, "--k", "1", "--R", "2", "--output", "human"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and "seeds" in proc.stdout
