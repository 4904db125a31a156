"""Time-limited multi-run comparison of K-means initialisation schemes.

Every run of a method seeds centers and then refines them with Lloyd. Within a
time budget ``TL`` a method keeps starting runs until ``TL`` seconds have
elapsed (a run that has started is always completed). For reproducible
reports the budget can be replaced by a fixed number of repeats.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .baselines import MedlloydConfig, run_medlloyd
from .clarans import ClaransEngine, StopCriterion
from .data import DENSE, Dataset
from .datagen import GridGaussianSpec, SyntheticSpec, gen_grid_gaussian, gen_synthetic
from .lloyd import mse_of, run_lloyd
from .metrics import MetricSpace
from .seeding import seed_bf, seed_kmpp, seed_uni

METHODS = ("uni", "kmpp", "bf", "clarans", "kmpp-clarans", "medlloyd")
REPORT_FORMATS = ("json", "csv", "plot")
SUMMARY_FIELDS = ("n_runs", "mean_init_mse", "min_final_mse", "mean_final_mse",
                  "mean_plus_std_final_mse")
_TIMING_FIELDS = ("init_time", "refine_time")


@dataclass
class BenchSpec:
    """What to benchmark.

    ``dataset`` is either ``{"generator": "grid", ...GridGaussianSpec fields}``,
    ``{"generator": "syn3", ...SyntheticSpec fields}`` or
    ``{"path": ..., "format": ...}``. With ``time_limit=None`` and
    ``repeats=None`` the budget is ``time_limit_factor`` times the duration of
    one k-means++ plus Lloyd run. ``repeats`` caps the runs per method; with
    ``time_limit=None`` and ``repeats`` set, exactly ``repeats`` runs are made.
    """

    dataset: dict
    n_clusters: int
    methods: list = field(default_factory=lambda: list(METHODS))
    time_limit: float | None = None
    time_limit_factor: float = 80.0
    repeats: int | None = None
    seed: int = 0
    level: int = 2
    max_rejections: int | None = None
    bf_partitions: int = 10
    include_timings: bool = True

    def __post_init__(self):
        self.methods = list(self.methods)
        if not self.methods:
            raise ValueError("at least one method is required")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown method(s) {unknown}; choose from {METHODS}")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("methods must be distinct")
        if self.time_limit is not None and not self.time_limit > 0:
            raise ValueError("time_limit must be > 0")
        if not self.time_limit_factor > 0:
            raise ValueError("time_limit_factor must be > 0")
        if self.repeats is not None and self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.n_clusters < 2:
            raise ValueError("n_clusters must be >= 2")

    def to_dict(self):
        return asdict(self)


@dataclass
class BenchReport:
    spec: dict
    time_limit: float | None
    normalizer: float | None
    runs: list
    summary: dict

    def to_dict(self) -> dict:
        return {
            "spec": self.spec,
            "time_limit": self.time_limit,
            "normalizer": self.normalizer,
            "summary": self.summary,
            "runs": self.runs,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BenchReport":
        return cls(spec=d["spec"], time_limit=d["time_limit"], normalizer=d["normalizer"],
                   runs=d["runs"], summary=d["summary"])


def load_bench_data(source: dict) -> tuple[Dataset, dict]:
    """Dataset for a ``BenchSpec.dataset`` entry, plus generator metadata."""
    source = dict(source)
    if "path" in source:
        from .io import load_dataset
        return load_dataset(source["path"], source.get("format", "dense-csv")), {}
    gen = source.pop("generator", "grid")
    if gen == "grid":
        grid = gen_grid_gaussian(GridGaussianSpec(**source))
        return grid.dataset, {"sigma": grid.sigma, "n_true_clusters": grid.centers.shape[0]}
    data, _, _ = gen_synthetic(SyntheticSpec(kind=gen, **source))
    return data, {}


def _run_seed(seed, method, r):
    ss = np.random.SeedSequence([int(seed), METHODS.index(method), int(r)])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def _probe_seed(seed):
    """Seed of the k-means++ run that calibrates the time budget."""
    ss = np.random.SeedSequence([int(seed), len(METHODS), 0])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def single_run(space: MetricSpace, n_clusters: int, method: str, seed: int, level: int = 2,
               max_rejections=None, bf_partitions: int = 10, clarans_time=None) -> dict:
    """Seed with ``method`` then refine with Lloyd; returns a run record."""
    X = space.data.samples
    rng = np.random.default_rng(seed)
    rec = {"method": method, "seed": seed, "n_evaluations": None, "n_implementations": None,
           "rejection_trace": None, "energy_trace": None}
    t0 = time.perf_counter()
    init_idx = init_pts = None
    if method == "uni":
        init_idx = seed_uni(space.n_samples, n_clusters, rng)
    elif method == "kmpp":
        init_idx = seed_kmpp(space, n_clusters, rng)
    elif method == "bf":
        init_pts = seed_bf(X, n_clusters, rng, bf_partitions)
    elif method in ("clarans", "kmpp-clarans"):
        start = seed_kmpp(space, n_clusters, rng) if method == "kmpp-clarans" else None
        engine = ClaransEngine(space, "quadratic", n_clusters, level=level, centers=start, seed=seed)
        report = engine.run(StopCriterion(max_rejections=max_rejections, time_limit=clarans_time))
        init_idx = engine.centers.copy()
        rec.update(n_evaluations=report.n_evaluations, n_implementations=report.n_implementations,
                   rejection_trace=list(report.rejection_trace),
                   energy_trace=list(report.energy_trace))
    elif method == "medlloyd":
        state, report = run_medlloyd(space, "quadratic", MedlloydConfig(n_clusters, seed=seed))
        init_idx = state.centers
        rec["energy_trace"] = list(report.energy_trace)
    else:
        raise ValueError(f"unknown method {method!r}")
    t1 = time.perf_counter()
    init = init_pts if init_pts is not None else X[init_idx]
    rec["init_mse"] = None if method == "bf" else mse_of(X, init)
    result = run_lloyd(X, np.asarray(init, dtype=np.float64))
    t2 = time.perf_counter()
    rec["final_mse"] = result.mse
    rec["lloyd_iterations"] = result.n_iter
    rec["init_time"] = t1 - t0
    rec["refine_time"] = t2 - t1
    return rec


def _summarize(runs, normalizer):
    out = {}
    scale = normalizer if normalizer else 1.0
    for method in dict.fromkeys(r["method"] for r in runs):
        mine = [r for r in runs if r["method"] == method]
        final = np.array([r["final_mse"] for r in mine]) / scale
        inits = [r["init_mse"] for r in mine if r["init_mse"] is not None]
        out[method] = {
            "n_runs": len(mine),
            "mean_init_mse": (math.fsum(inits) / len(inits) / scale) if inits else None,
            "min_final_mse": float(final.min()),
            "mean_final_mse": float(final.mean()),
            "mean_plus_std_final_mse": float(final.mean() + final.std()),
        }
    return out


def run_benchmark(spec: BenchSpec, n_threads: int = 1) -> BenchReport:
    """Run every method of ``spec`` and summarise its MSEs.

    Summary MSEs are divided by the mean k-means++ initialisation MSE when
    k-means++ is among the methods (otherwise left raw, ``normalizer=None``).
    The initialisation MSE of bf is not reported since it returns means
    rather than samples. Methods that complete no run are marked absent.
    ``n_threads > 1`` runs methods concurrently, only in fixed-repeat mode
    where timing does not decide the number of runs.
    """
    data, _ = load_bench_data(spec.dataset)
    if data.kind != DENSE:
        raise ValueError("benchmarks require dense vector data")
    space = MetricSpace(data, "l2")
    K = spec.n_clusters
    if space.n_samples <= K:
        raise ValueError("need more samples than clusters")

    time_limit = spec.time_limit
    fixed = spec.time_limit is None and spec.repeats is not None
    if not fixed and time_limit is None:
        probe = single_run(space, K, "kmpp", _probe_seed(spec.seed))
        time_limit = spec.time_limit_factor * (probe["init_time"] + probe["refine_time"])

    def runs_of(method):
        # each method gets its own space so distance counters never interleave
        own = MetricSpace(data, "l2")
        out = []
        start = time.perf_counter()
        r = 0
        while True:
            if spec.repeats is not None and r >= spec.repeats:
                break
            if not fixed and time.perf_counter() - start >= time_limit:
                break
            rec = single_run(own, K, method, _run_seed(spec.seed, method, r), level=spec.level,
                             max_rejections=spec.max_rejections, bf_partitions=spec.bf_partitions)
            rec["run"] = r
            if not spec.include_timings:
                for f in _TIMING_FIELDS:
                    rec[f] = None
            out.append(rec)
            r += 1
        return out

    if fixed and n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            per_method = list(pool.map(runs_of, spec.methods))
    else:
        per_method = [runs_of(m) for m in spec.methods]
    runs = [rec for recs in per_method for rec in recs]

    kmpp_inits = [r["init_mse"] for r in runs if r["method"] == "kmpp"]
    normalizer = math.fsum(kmpp_inits) / len(kmpp_inits) if kmpp_inits else None
    summary = _summarize(runs, normalizer)
    for method in spec.methods:
        summary.setdefault(method, {"n_runs": 0, "absent": True})
    summary = {m: summary[m] for m in spec.methods}
    return BenchReport(spec=spec.to_dict(), time_limit=None if fixed else time_limit,
                       normalizer=normalizer, runs=runs, summary=summary)


def plot_rows(report: BenchReport) -> list:
    """``(series, method, run, x, y)`` rows: energy trajectories and rejection traces."""
    rows = []
    for rec in report.runs:
        for x, y in enumerate(rec.get("energy_trace") or []):
            rows.append(("energy", rec["method"], rec["run"], x, y))
        for x, y in enumerate(rec.get("rejection_trace") or []):
            rows.append(("rejections", rec["method"], rec["run"], x, y))
    return rows


def format_report(report: BenchReport, format: str = "json") -> str:
    if format == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if format == "csv":
        methods = list(report.summary)
        w.writerow(["statistic", *methods])
        for stat in SUMMARY_FIELDS:
            w.writerow([stat, *("" if report.summary[m].get(stat) is None else repr(report.summary[m][stat])
                                for m in methods)])
    elif format == "plot":
        w.writerow(["series", "method", "run", "x", "y"])
        for row in plot_rows(report):
            w.writerow([*row[:4], repr(row[4])])
    else:
        raise ValueError(f"unknown report format {format!r}; choose from {REPORT_FORMATS}")
    return buf.getvalue()


def emit_report(report: BenchReport, path, format: str = "json") -> None:
    """Write ``report`` to ``path`` as json, a csv summary table or plot data."""
    text = format_report(report, format)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def read_report(path) -> BenchReport:
    with open(path, encoding="utf-8") as fh:
        return BenchReport.from_dict(json.load(fh))


# ---------------------------------------------------------------- studies


def simulation_study(side=8, points_per_cluster=20, sigmas=(2**-4, 2**-3, 2**-2),
                     seeds=range(10), methods=("kmpp", "clarans"), level=2,
                     max_rejections=None) -> list:
    """Grid-Gaussian study with ``K = side**2``: one run per (sigma, seed, method).

    Returns records with ``init_mse`` and ``final_mse`` divided by the true
    cluster variance ``2 * sigma**2`` (the expected squared distance of a
    sample from its generating center in the plane), so the true clustering
    scores close to 1.
    """
    out = []
    K = side * side
    for sigma in sigmas:
        for s in seeds:
            grid = gen_grid_gaussian(side=side, points_per_cluster=points_per_cluster,
                                     sigma=sigma, seed=s)
            space = MetricSpace(grid.dataset, "l2")
            for method in methods:
                rec = single_run(space, K, method, _run_seed(s, method, 0), level=level,
                                 max_rejections=max_rejections)
                init = rec["init_mse"]
                var = 2 * sigma**2
                out.append({
                    "sigma": sigma, "seed": s, "method": method,
                    "init_mse_rel": None if init is None else init / var,
                    "final_mse_rel": rec["final_mse"] / var,
                })
    return out


def itok_sweep(spec: BenchSpec, itoks=(0, 1, 2, 4)) -> dict:
    """Final MSE of k-means++ then time-limited swaps then Lloyd, per time multiple.

    The swap search gets ``itok`` times the duration of one k-means++ plus
    Lloyd run. Returns ``{itok: [final_mse per repeat]}``.
    """
    data, _ = load_bench_data(spec.dataset)
    space = MetricSpace(data, "l2")
    probe = single_run(space, spec.n_clusters, "kmpp", _probe_seed(spec.seed))
    t_pp = probe["init_time"] + probe["refine_time"]
    out = {}
    for itok in itoks:
        out[itok] = [
            single_run(space, spec.n_clusters, "kmpp-clarans",
                       _run_seed(spec.seed, "kmpp-clarans", r), level=spec.level,
                       clarans_time=itok * t_pp)["final_mse"]
            for r in range(spec.repeats or 1)
        ]
    return out
