import csv
import io
import json

import numpy as np
import pytest

from kmedswap.bench import (
    METHODS,
    SUMMARY_FIELDS,
    BenchReport,
    BenchSpec,
    emit_report,
    format_report,
    itok_sweep,
    plot_rows,
    read_report,
    run_benchmark,
    simulation_study,
    single_run,
)
from kmedswap.datagen import gen_grid_gaussian
from kmedswap.io import write_dataset
from kmedswap.metrics import MetricSpace

SMALL_GRID = {"generator": "grid", "side": 3, "points_per_cluster": 12, "sigma": 0.1, "seed": 0}


def fixed_spec(**kw):
    base = dict(dataset=SMALL_GRID, n_clusters=9, repeats=2, seed=1, include_timings=False)
    base.update(kw)
    return BenchSpec(**base)


def test_single_repeat_single_method():
    rep = run_benchmark(fixed_spec(methods=["uni"], repeats=1))
    assert len(rep.runs) == 1
    run = rep.runs[0]
    assert run["init_mse"] is not None and run["final_mse"] is not None
    assert run["final_mse"] <= run["init_mse"]
    assert rep.normalizer is None
    assert rep.summary["uni"]["mean_init_mse"] == run["init_mse"]


def test_kmpp_normalized_init_is_one():
    rep = run_benchmark(fixed_spec(methods=["uni", "kmpp"], repeats=3))
    assert rep.summary["kmpp"]["mean_init_mse"] == 1.0
    assert rep.normalizer == pytest.approx(np.mean([r["init_mse"] for r in rep.runs
                                                    if r["method"] == "kmpp"]))


def test_every_method_runs_and_final_not_above_init():
    rep = run_benchmark(fixed_spec(methods=list(METHODS), repeats=2))
    assert [m for m in rep.summary] == list(METHODS)
    for r in rep.runs:
        if r["method"] == "bf":
            assert r["init_mse"] is None
        else:
            assert r["final_mse"] <= r["init_mse"] * (1 + 1e-12)
    assert rep.summary["bf"]["mean_init_mse"] is None
    s = rep.summary["clarans"]
    assert s["min_final_mse"] <= s["mean_final_mse"] <= s["mean_plus_std_final_mse"]


def test_clarans_init_beats_kmpp_on_separated_grid():
    spec = BenchSpec(dataset={"generator": "grid", "side": 6, "points_per_cluster": 20,
                              "sigma": 2**-4, "seed": 0},
                     n_clusters=36, methods=["kmpp", "clarans"], repeats=4, seed=0)
    rep = run_benchmark(spec)
    assert rep.summary["clarans"]["mean_init_mse"] < rep.summary["kmpp"]["mean_init_mse"]


def test_k_equal_distinct_points_gives_zero_mse(tmp_path):
    base = np.array([[0.0, 0.0], [3.0, 0.0], [0.0, 3.0], [3.0, 3.0]])
    X = np.repeat(base, 12, axis=0)
    path = tmp_path / "dups.csv"
    write_dataset(X, path)
    spec = BenchSpec(dataset={"path": str(path), "format": "dense-csv"}, n_clusters=4,
                     methods=list(METHODS), repeats=3, seed=0, bf_partitions=2,
                     max_rejections=200)
    rep = run_benchmark(spec)
    for r in rep.runs:
        assert r["final_mse"] == 0.0, r["method"]


def test_unknown_method_fails_before_running():
    with pytest.raises(ValueError):
        BenchSpec(dataset=SMALL_GRID, n_clusters=9, methods=["kmpp", "afk-mc2"])
    with pytest.raises(ValueError):
        BenchSpec(dataset=SMALL_GRID, n_clusters=9, methods=[])
    with pytest.raises(ValueError):
        BenchSpec(dataset=SMALL_GRID, n_clusters=9, time_limit=0)


def test_csv_header_lists_methods_in_spec_order():
    rep = run_benchmark(fixed_spec(methods=["medlloyd", "uni", "kmpp"]))
    rows = list(csv.reader(io.StringIO(format_report(rep, "csv"))))
    assert rows[0] == ["statistic", "medlloyd", "uni", "kmpp"]
    assert [r[0] for r in rows[1:]] == list(SUMMARY_FIELDS)


def test_plot_rows_for_two_point_trajectory():
    rep = BenchReport(spec={}, time_limit=None, normalizer=None, summary={}, runs=[
        {"method": "clarans", "run": 0, "energy_trace": [2.0, 1.0], "rejection_trace": None}])
    assert plot_rows(rep) == [("energy", "clarans", 0, 0, 2.0), ("energy", "clarans", 0, 1, 1.0)]
    lines = format_report(rep, "plot").splitlines()
    assert lines[0] == "series,method,run,x,y" and len(lines) == 3


def test_json_round_trip(tmp_path):
    rep = run_benchmark(fixed_spec(methods=["kmpp", "clarans", "bf"]))
    path = tmp_path / "r.json"
    emit_report(rep, path, "json")
    assert read_report(path) == BenchReport.from_dict(json.loads(json.dumps(rep.to_dict())))
    assert read_report(path).to_dict() == json.loads(path.read_text())


def test_fixed_repeats_reproduce_identical_bytes():
    texts = [format_report(run_benchmark(fixed_spec(methods=["kmpp", "clarans", "medlloyd"]),
                                         n_threads=t), "json") for t in (1, 3)]
    assert texts[0] == texts[1]
    assert '"init_time": null' in texts[0]


def test_time_limited_mode_respects_budget():
    spec = BenchSpec(dataset=SMALL_GRID, n_clusters=9, methods=["uni", "kmpp"], time_limit=0.05,
                     seed=0)
    rep = run_benchmark(spec)
    assert rep.time_limit == 0.05
    for m in ("uni", "kmpp"):
        assert rep.summary[m]["n_runs"] >= 1


def test_default_budget_is_multiple_of_kmpp_run():
    spec = BenchSpec(dataset=SMALL_GRID, n_clusters=9, methods=["uni"], time_limit_factor=2.0)
    rep = run_benchmark(spec)
    assert rep.time_limit is not None and rep.time_limit > 0
    assert rep.summary["uni"]["n_runs"] >= 1
    capped = run_benchmark(BenchSpec(dataset=SMALL_GRID, n_clusters=9, methods=["uni"],
                                     time_limit=60.0, repeats=2))
    assert capped.summary["uni"]["n_runs"] == 2


def test_absent_method_is_marked(monkeypatch):
    import kmedswap.bench as bench

    # a clock that jumps past the budget before the first run can start
    ticks = iter(range(0, 10**6, 10))
    monkeypatch.setattr(bench.time, "perf_counter", lambda: float(next(ticks)))
    spec = BenchSpec(dataset=SMALL_GRID, n_clusters=9, methods=["uni", "kmpp"], time_limit=1.0)
    rep = bench.run_benchmark(spec)
    assert rep.summary == {"uni": {"n_runs": 0, "absent": True},
                           "kmpp": {"n_runs": 0, "absent": True}}
    assert rep.normalizer is None and rep.runs == []


def test_unwritable_report_path(tmp_path):
    rep = run_benchmark(fixed_spec(methods=["uni"], repeats=1))
    with pytest.raises(OSError):
        emit_report(rep, tmp_path / "missing" / "r.json")
    with pytest.raises(ValueError):
        format_report(rep, "xml")


def test_benchmark_rejects_sequence_data(tmp_path):
    path = tmp_path / "w.txt"
    path.write_text("ab\ncd\nef\n")
    with pytest.raises(ValueError):
        run_benchmark(BenchSpec(dataset={"path": str(path), "format": "lines-of-text"},
                                n_clusters=2, methods=["uni"], repeats=1))


def test_single_run_records():
    grid = gen_grid_gaussian(side=3, points_per_cluster=10, sigma=0.1, seed=0)
    space = MetricSpace(grid.dataset)
    rec = single_run(space, 9, "clarans", 0)
    assert rec["n_implementations"] == len(rec["rejection_trace"])
    assert rec["energy_trace"][0] >= rec["energy_trace"][-1]
    with pytest.raises(ValueError):
        single_run(space, 9, "nope", 0)


def test_simulation_study_normalizes_by_cluster_variance():
    out = simulation_study(side=3, points_per_cluster=30, sigmas=(0.05,), seeds=range(2),
                           methods=("clarans",))
    assert len(out) == 2
    for rec in out:
        assert 0.7 < rec["final_mse_rel"] < 1.3


def test_itok_sweep_keys():
    spec = fixed_spec(methods=["kmpp-clarans"], repeats=1)
    out = itok_sweep(spec, itoks=(0, 1))
    assert set(out) == {0, 1} and all(len(v) == 1 for v in out.values())
