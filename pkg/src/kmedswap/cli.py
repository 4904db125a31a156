"""Command line: ``kmedswap gen | cluster | bench``.

Every subcommand accepts ``--config FILE`` (JSON or YAML) whose keys are the
option names with underscores; explicit flags override the file.
"""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np
import yaml

from .baselines import MedlloydConfig, run_medlloyd, run_pam
from .bench import (
    METHODS,
    REPORT_FORMATS,
    BenchSpec,
    emit_report,
    format_report,
    itok_sweep,
    run_benchmark,
)
from .clarans import LEVELS, EngineConfig, StopCriterion, run_clarans
from .datagen import SYNTHETIC_KINDS, GridGaussianSpec, SyntheticSpec, gen_grid_gaussian, gen_synthetic
from .io import FORMATS, load_dataset, write_dataset
from .metrics import METRICS, MetricSpace, canonical_metric
from .potentials import POTENTIALS, Potential

THREADS_ENV = "KMEDSWAP_THREADS"


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise click.UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 1:
        raise click.UsageError(f"{THREADS_ENV} must be >= 1")
    return n


def _load_config(ctx, param, value):
    if value is None:
        return None
    with open(value, encoding="utf-8") as fh:
        text = fh.read()
    try:
        cfg = json.loads(text) if value.endswith(".json") else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise click.BadParameter(f"cannot parse {value}: {exc}") from None
    if not isinstance(cfg, dict):
        raise click.BadParameter(f"{value} must hold a mapping of option names to values")
    # keys are long flag names with underscores ("n_clusters" for --n-clusters)
    names = {}
    for p in ctx.command.params:
        names[p.name] = p.name
        for opt in p.opts:
            if opt.startswith("--"):
                names[opt[2:].replace("-", "_")] = p.name
    unknown = sorted(k for k in cfg if k not in names)
    if unknown:
        raise click.BadParameter(f"unknown keys in {value}: {', '.join(unknown)}")
    mapped = {names[k]: v for k, v in cfg.items()}
    ctx.default_map = {**(ctx.default_map or {}), **mapped}
    return value


config_option = click.option(
    "--config", type=click.Path(exists=True, dir_okay=False), callback=_load_config,
    is_eager=True, expose_value=False, help="JSON or YAML file of option values.")


def _fail(exc):
    raise click.ClickException(str(exc)) from exc


@click.group()
@click.version_option(package_name="artifact")
def main():
    """K-medoids clustering and K-means seeding by swap search."""


@main.command()
@config_option
@click.option("--kind", type=click.Choice(("grid",) + SYNTHETIC_KINDS), default="grid", show_default=True)
@click.option("--side", type=int, default=20, show_default=True, help="Grid side (grid).")
@click.option("--points-per-cluster", type=int, default=100, show_default=True)
@click.option("--sigma", type=float, default=2**-4, show_default=True)
@click.option("--blobs-per-cell", type=int, default=1, show_default=True)
@click.option("--n-centers", type=int, default=None, help="Number of centers (syn1, syn2).")
@click.option("--n-samples", type=int, default=2000, show_default=True, help="Samples (syn4).")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
def gen(kind, side, points_per_cluster, sigma, blobs_per_cell, n_centers, n_samples, seed, output):
    """Generate a synthetic dataset and write it to OUTPUT."""
    try:
        if kind == "grid":
            data = gen_grid_gaussian(GridGaussianSpec(
                side=side, points_per_cluster=points_per_cluster, sigma=sigma, seed=seed,
                blobs_per_cell=blobs_per_cell)).dataset
        else:
            spec = SyntheticSpec(kind=kind, seed=seed, n_centers=n_centers, n_samples=n_samples)
            if kind == "syn3":
                spec.samples_per_center = points_per_cluster
                spec.grid_side = side
                spec.sigma = sigma
            data, _, _ = gen_synthetic(spec)
        write_dataset(data, output)
    except (ValueError, OSError) as exc:
        _fail(exc)
    click.echo(f"wrote {data.n_samples} samples to {output}")


@main.command()
@config_option
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="dense-csv", show_default=True)
@click.option("-k", "--n-clusters", type=int, required=True)
@click.option("--method", type=click.Choice(("clarans", "medlloyd", "pam")), default="clarans",
              show_default=True)
@click.option("--metric", type=click.Choice(METRICS + ("euclidean",)), default="l2", show_default=True)
@click.option("--potential", type=click.Choice(POTENTIALS), default="quadratic", show_default=True)
@click.option("--step-radius", type=float, default=0.05, show_default=True)
@click.option("--level", type=click.IntRange(min(LEVELS), max(LEVELS)), default=2, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-rejections", type=int, default=None, help="Default: K squared.")
@click.option("--max-swaps", type=int, default=None)
@click.option("--time-limit", type=float, default=None, help="Seconds.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="JSON result file (stdout when omitted).")
def cluster(data_path, fmt, n_clusters, method, metric, potential, step_radius, level, seed,
            max_rejections, max_swaps, time_limit, output):
    """Cluster a dataset file with a K-medoids algorithm."""
    try:
        data = load_dataset(data_path, fmt)
        space = MetricSpace(data, canonical_metric(metric))
        psi = Potential(potential, radius=step_radius)
        if not 2 <= n_clusters < space.n_samples:
            raise ValueError(f"n_clusters must be in [2, {space.n_samples - 1}]")
        if method == "clarans":
            stop = StopCriterion(max_rejections=max_rejections, max_swaps=max_swaps,
                                 time_limit=time_limit)
            state, report = run_clarans(space, psi, EngineConfig(n_clusters, level=level, seed=seed,
                                                                 stop=stop))
        elif method == "medlloyd":
            state, report = run_medlloyd(space, psi, MedlloydConfig(n_clusters, seed=seed))
        else:
            init = np.random.default_rng(seed).choice(space.n_samples, n_clusters, replace=False)
            state, report = run_pam(space, psi, init)
    except (ValueError, TypeError, OSError) as exc:
        _fail(exc)
    result = {
        "method": method,
        "n_clusters": n_clusters,
        "medoids": [int(c) for c in state.centers],
        "labels": [int(a) for a in state.a1],
        "energy": state.energy,
        "report": report.to_dict(),
    }
    text = json.dumps(result, indent=2) + "\n"
    if output:
        try:
            with open(output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            _fail(exc)
    else:
        click.echo(text, nl=False)


@main.command()
@config_option
@click.option("--generator", type=click.Choice(("grid",) + SYNTHETIC_KINDS), default="grid",
              show_default=True)
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Dense CSV file; overrides --generator.")
@click.option("--side", type=int, default=8, show_default=True)
@click.option("--points-per-cluster", type=int, default=20, show_default=True)
@click.option("--sigma", type=float, default=2**-4, show_default=True)
@click.option("--data-seed", type=int, default=0, show_default=True)
@click.option("-k", "--n-clusters", type=int, default=None, help="Default: side squared.")
@click.option("--methods", default=",".join(METHODS), show_default=True,
              help="Comma-separated list.")
@click.option("--time-limit", type=float, default=None, help="Seconds per method.")
@click.option("--time-limit-factor", type=float, default=80.0, show_default=True,
              help="Budget as a multiple of one k-means++ plus Lloyd run.")
@click.option("--repeats", type=int, default=None, help="Run cap per method; fixed count without --time-limit.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--level", type=click.IntRange(min(LEVELS), max(LEVELS)), default=2, show_default=True)
@click.option("--max-rejections", type=int, default=None)
@click.option("--no-timings", is_flag=True, help="Blank out wall times for byte-stable reports.")
@click.option("--itok", is_flag=True, help="Sweep swap-search time over 0, 1, 2, 4 x the k-means++ time.")
@click.option("--threads", type=int, default=None, help=f"Default: ${THREADS_ENV} or 1.")
@click.option("--format", "fmt", type=click.Choice(REPORT_FORMATS), default="json", show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
def bench(generator, data_path, side, points_per_cluster, sigma, data_seed, n_clusters, methods,
          time_limit, time_limit_factor, repeats, seed, level, max_rejections, no_timings, itok,
          threads, fmt, output):
    """Compare initialisation schemes under a time budget or fixed repeats."""
    threads = threads or default_threads()
    if data_path:
        dataset = {"path": data_path, "format": "dense-csv"}
    elif generator == "grid":
        dataset = {"generator": "grid", "side": side, "points_per_cluster": points_per_cluster,
                   "sigma": sigma, "seed": data_seed}
    elif generator == "syn3":
        dataset = {"generator": "syn3", "grid_side": side, "samples_per_center": points_per_cluster,
                   "sigma": sigma, "seed": data_seed}
    else:
        dataset = {"generator": generator, "seed": data_seed}
    K = n_clusters if n_clusters is not None else side * side
    try:
        spec = BenchSpec(dataset=dataset, n_clusters=K,
                         methods=[m.strip() for m in methods.split(",") if m.strip()],
                         time_limit=time_limit, time_limit_factor=time_limit_factor,
                         repeats=repeats, seed=seed, level=level, max_rejections=max_rejections,
                         include_timings=not no_timings)
        if itok:
            text = json.dumps({str(k): v for k, v in itok_sweep(spec).items()}, indent=2) + "\n"
            if output:
                with open(output, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                click.echo(text, nl=False)
            return
        report = run_benchmark(spec, n_threads=threads)
        if output:
            emit_report(report, output, fmt)
        else:
            click.echo(format_report(report, fmt), nl=False)
    except (ValueError, TypeError, OSError) as exc:
        _fail(exc)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
