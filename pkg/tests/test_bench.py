import csv
import io
import runpy
import sys
from pathlib import Path

SCRIPT = Path(__file__).resolve().parent.parent / "benchmarks" / "bench_backends.py"


def test_backend_benchmark_runs(capsys, monkeypatch):
    monkeypatch.setattr(sys, "argv", [str(SCRIPT), "--n", "300", "--R", "4", "--k", "3", "--repeat", "1"])
    try:
        runpy.run_path(str(SCRIPT), run_name="__main__")
    except SystemExit as exc:
        assert exc.code == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) >= 6
    assert {r["backend"] for r in rows} <= {"compiled", "python"}
