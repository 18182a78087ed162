#!/usr/bin/env python3
"""
Curve benchmark runner and baseline comparison.
"""

import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent / "benchmarks"))

import compare_baseline  # noqa: E402
import run_benchmark  # noqa: E402

pytestmark = pytest.mark.core


def results(**entries):
    return {"dims": [20, 20, 5], "seed": 0, "grid": [2, 4], "results": entries}


def test_within_tolerance_is_clean():
    base = results(**{"denoise|syn0|sigma=0.1": {"final_rmse": 0.100}})
    cur = results(**{"denoise|syn0|sigma=0.1": {"final_rmse": 0.104}})
    warnings, regressions = compare_baseline._compare(cur, base, 0.05)
    assert warnings == [] and regressions == []


def test_rmse_rise_is_a_regression():
    base = results(**{"recovery|syn0|missing=0.1": {"final_rmse": 0.1, "final_heldout_rmse": 0.2}})
    cur = results(**{"recovery|syn0|missing=0.1": {"final_rmse": 0.1, "final_heldout_rmse": 0.3}})
    _, regressions = compare_baseline._compare(cur, base, 0.05)
    assert len(regressions) == 1 and "final_heldout_rmse" in regressions[0]


def test_missing_new_and_errored_keys():
    base = results(a={"final_rmse": 0.1}, b={"final_rmse": 0.1})
    cur = results(b={"error": "boom"}, c={"final_rmse": 0.1})
    cur["seed"] = 1
    warnings, regressions = compare_baseline._compare(cur, base, 0.05)
    assert any(r.startswith("MISSING: baseline had a") for r in regressions)
    assert any(r.startswith("ERROR: b") for r in regressions)
    assert any(w.startswith("NEW: c") for w in warnings)
    assert any(w.startswith("SETUP: seed") for w in warnings)


def test_improvement_is_only_a_warning():
    base = results(a={"final_rmse": 0.2})
    cur = results(a={"final_rmse": 0.1})
    warnings, regressions = compare_baseline._compare(cur, base, 0.05)
    assert regressions == [] and warnings[0].startswith("IMPROVED")


def test_runner_writes_keyed_results_and_compares_clean(tmp_path, capsys):
    out = tmp_path / "run.json"
    assert run_benchmark.main(["--presets", "syn0", "--tasks", "denoise", "--grid", "1,2", "--output", str(out)]) == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    entry = doc["results"]["denoise|syn0|sigma=0.1"]
    assert entry["atom_counts"] == [1, 2]
    assert entry["final_rmse"] == entry["rmse"][-1]
    assert compare_baseline.main([str(out), "--baseline", str(out)]) == 0
