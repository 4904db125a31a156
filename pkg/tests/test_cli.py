import json

import numpy as np
import pytest
from click.testing import CliRunner

from kmedswap.cli import THREADS_ENV, main
from kmedswap.io import load_dataset


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def grid_file(tmp_path, runner):
    path = tmp_path / "grid.csv"
    res = runner.invoke(main, ["gen", "--side", "3", "--points-per-cluster", "10", "--sigma", "0.1",
                               "-o", str(path)])
    assert res.exit_code == 0, res.output
    return path


def test_gen_writes_expected_sample_count(grid_file):
    assert load_dataset(grid_file).n_samples == 90


@pytest.mark.parametrize("kind, fmt, n", [("syn1", "lines-of-text", 500), ("syn3", "dense-csv", 18),
                                          ("syn4", "dense-csv", 2000)])
def test_gen_synthetic_kinds(tmp_path, runner, kind, fmt, n):
    path = tmp_path / "d"
    args = ["gen", "--kind", kind, "-o", str(path)]
    if kind == "syn3":
        args += ["--side", "3", "--points-per-cluster", "2"]
    res = runner.invoke(main, args)
    assert res.exit_code == 0, res.output
    assert load_dataset(path, fmt).n_samples == n


@pytest.mark.parametrize("method", ["clarans", "medlloyd", "pam"])
def test_cluster_methods(runner, grid_file, method):
    res = runner.invoke(main, ["cluster", "--data", str(grid_file), "-k", "9", "--method", method])
    assert res.exit_code == 0, res.output
    out = json.loads(res.output)
    assert len(out["medoids"]) == 9 and len(out["labels"]) == 90
    assert out["energy"] <= out["report"]["initial_energy"]


def test_cluster_sequences(tmp_path, runner):
    path = tmp_path / "w.txt"
    path.write_text("\n".join(["ACGT", "ACGA", "ACG", "TTTT", "TTTA", "TTAT", "GGGG", "GGCG"]) + "\n")
    res = runner.invoke(main, ["cluster", "--data", str(path), "--format", "lines-of-text", "-k", "3",
                               "--metric", "levenshtein", "--level", "1"])
    assert res.exit_code == 0, res.output
    assert len(json.loads(res.output)["medoids"]) == 3


def test_cluster_output_file_and_stop_flags(tmp_path, runner, grid_file):
    out = tmp_path / "r.json"
    res = runner.invoke(main, ["cluster", "--data", str(grid_file), "-k", "9", "--max-swaps", "2",
                               "-o", str(out)])
    assert res.exit_code == 0, res.output
    assert json.loads(out.read_text())["report"]["n_implementations"] <= 2


def test_config_file_supplies_options(tmp_path, runner, grid_file):
    cfg = tmp_path / "c.yaml"
    cfg.write_text(f"data: {grid_file}\nn_clusters: 9\nlevel: 0\nseed: 4\n")
    res = runner.invoke(main, ["cluster", "--config", str(cfg)])
    assert res.exit_code == 0, res.output
    out = json.loads(res.output)
    assert out["report"]["level"] == 0
    # explicit flags override the file
    res = runner.invoke(main, ["cluster", "--config", str(cfg), "--level", "2"])
    assert json.loads(res.output)["report"]["level"] == 2
    # identical result to the equivalent flags
    flags = runner.invoke(main, ["cluster", "--data", str(grid_file), "-k", "9", "--level", "0",
                                 "--seed", "4"])
    a = json.loads(flags.output)
    b = json.loads(runner.invoke(main, ["cluster", "--config", str(cfg)]).output)
    for r in (a, b):
        r["report"].pop("wall_time")
    assert a == b


def test_config_json_and_unknown_key(tmp_path, runner, grid_file):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"data": str(grid_file), "n_clusters": 9}))
    assert runner.invoke(main, ["cluster", "--config", str(cfg)]).exit_code == 0
    cfg.write_text(json.dumps({"data": str(grid_file), "n_clusters": 9, "colour": "red"}))
    res = runner.invoke(main, ["cluster", "--config", str(cfg)])
    assert res.exit_code != 0 and "colour" in res.output


def test_bench_fixed_repeats_json_and_csv(tmp_path, runner):
    args = ["bench", "--side", "3", "--points-per-cluster", "10", "--methods", "kmpp,clarans",
            "--repeats", "2", "--no-timings"]
    res = runner.invoke(main, args)
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert report["summary"]["kmpp"]["mean_init_mse"] == 1.0
    assert runner.invoke(main, args).output == res.output
    out = tmp_path / "t.csv"
    res = runner.invoke(main, args + ["--format", "csv", "-o", str(out)])
    assert res.exit_code == 0
    assert out.read_text().splitlines()[0] == "statistic,kmpp,clarans"


def test_bench_plot_and_itok(runner):
    base = ["bench", "--side", "3", "--points-per-cluster", "10", "--repeats", "1"]
    res = runner.invoke(main, base + ["--methods", "clarans", "--format", "plot"])
    assert res.exit_code == 0 and res.output.startswith("series,method,run,x,y")
    res = runner.invoke(main, base + ["--itok"])
    assert res.exit_code == 0, res.output
    assert set(json.loads(res.output)) == {"0", "1", "2", "4"}


def test_thread_count_from_environment(runner):
    args = ["bench", "--side", "3", "--points-per-cluster", "10", "--methods", "uni,kmpp",
            "--repeats", "1", "--no-timings"]
    one = runner.invoke(main, args, env={THREADS_ENV: "1"})
    two = runner.invoke(main, args, env={THREADS_ENV: "2"})
    assert one.exit_code == two.exit_code == 0
    assert one.output == two.output
    bad = runner.invoke(main, args, env={THREADS_ENV: "many"})
    assert bad.exit_code != 0 and THREADS_ENV in bad.output


@pytest.mark.parametrize("args", [
    ["cluster", "--data", "missing.csv", "-k", "2"],
    ["bench", "--methods", "kmpp,afk-mc2", "--repeats", "1"],
    ["gen", "--side", "1", "-o", "x.csv"],
    ["cluster", "--level", "7"],
])
def test_errors_exit_nonzero_with_message(runner, args):
    with runner.isolated_filesystem():
        res = runner.invoke(main, args)
    assert res.exit_code != 0
    assert res.output.strip()


def test_cluster_k_out_of_range(runner, grid_file):
    res = runner.invoke(main, ["cluster", "--data", str(grid_file), "-k", "90"])
    assert res.exit_code != 0 and "n_clusters" in res.output


def test_malformed_data_reports_line(tmp_path, runner):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\n3\n")
    res = runner.invoke(main, ["cluster", "--data", str(path), "-k", "2"])
    assert res.exit_code != 0 and "line 2" in res.output


def test_version(runner):
    res = runner.invoke(main, ["--version"])
    assert res.exit_code == 0 and "version" in res.output.lower()


def test_output_is_valid_for_numpy(runner, grid_file):
    out = json.loads(runner.invoke(main, ["cluster", "--data", str(grid_file), "-k", "9"]).output)
    assert np.unique(out["medoids"]).size == 9
