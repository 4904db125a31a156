"""Reference K-medoids algorithms: Voronoi iteration (medlloyd) and exhaustive swaps (pam)."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .clarans import RunReport
from .metrics import MetricSpace
from .potentials import get_potential
from .state import (
    _check_centers,
    assign_nearest,
    cluster_medoid,
    rebuild_state,
)


@dataclass
class MedlloydConfig:
    n_clusters: int
    seed: int | None = 0
    max_iter: int = 1000
    init: object = "random"

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


def _counts(space, before):
    full, aborted = space.counter.snapshot()
    return {"full": full - before[0], "aborted": aborted - before[1]}


def run_medlloyd(space: MetricSpace, potential, config: MedlloydConfig):
    """Alternate nearest-center assignment and per-cluster medoid updates.

    Stops when an update leaves the center set unchanged or after
    ``config.max_iter`` iterations. A cluster that loses all its members is
    re-seeded at a uniformly drawn non-center sample.

    Returns
    -------
    state : ClusterState
    report : RunReport
        ``energy_trace`` holds the energy after each assignment step.
    """
    psi = get_potential(potential)
    N, K = space.n_samples, int(config.n_clusters)
    if K < 2 or N < K:
        raise ValueError("need 2 <= n_clusters <= n_samples")
    rng = np.random.default_rng(config.seed)
    if isinstance(config.init, str):
        if config.init != "random":
            raise ValueError(f"unknown init {config.init!r}")
        centers = rng.choice(N, K, replace=False)
    else:
        centers = _check_centers(config.init, N)
        if centers.size != K:
            raise ValueError(f"expected {K} initial centers, got {centers.size}")
    centers = centers.astype(np.intp).copy()
    before = space.counter.snapshot()
    t0 = time.perf_counter()
    report = RunReport(algorithm="medlloyd", n_clusters=K)
    it = 0
    stop_reason = "max_iter"
    while it < config.max_iter:
        it += 1
        a1, d1 = assign_nearest(centers, space)
        report.energy_trace.append(math.fsum(psi(d1)) / N)
        new = centers.copy()
        empty = []
        for k in range(K):
            members = np.flatnonzero(a1 == k)
            if members.size:
                new[k] = cluster_medoid(members, space, psi)
            else:
                empty.append(k)
        if empty:
            # possible only when centers sit on duplicate points
            keep = np.delete(new, empty)
            pool = np.setdiff1d(np.arange(N), keep)
            new[empty] = rng.choice(pool, len(empty), replace=False)
        if np.array_equal(np.sort(new), np.sort(centers)):
            centers = new
            stop_reason = "converged"
            break
        centers = new
    state = rebuild_state(centers, space, psi)
    report.initial_energy = report.energy_trace[0]
    report.final_energy = state.energy
    report.n_iterations = it
    report.wall_time = time.perf_counter() - t0
    report.stop_reason = stop_reason
    report.distance_counts = {"run": _counts(space, before)}
    return state, report


def _swap_deltas(state, d, kp_count, psi):
    """Exact summed energy change per cluster index for new center at distances ``d``."""
    e1 = state.e1
    g = np.where(d < state.d1, psi(d) - e1, 0.0)
    h = np.where(d >= state.d2, state.margins, psi(d) - e1)
    return [math.fsum(np.where(state.a1 == kp, h, g)) for kp in range(kp_count)]


def run_pam(space: MetricSpace, potential, centers, max_sweeps: int | None = None):
    """Exhaustive best-improvement swap search.

    Every sweep evaluates all ``K*(N-K)`` swaps and implements the best one
    (lowest ``(kp, ip)`` among equals) if it strictly lowers the energy;
    otherwise the search stops. Intended for small instances.
    """
    psi = get_potential(potential)
    N = space.n_samples
    centers = _check_centers(centers, N).copy()
    K = centers.size
    before = space.counter.snapshot()
    t0 = time.perf_counter()
    state = rebuild_state(centers, space, psi)
    report = RunReport(algorithm="pam", n_clusters=K, initial_energy=state.energy)
    report.energy_trace.append(state.energy)
    sweeps = 0
    report.stop_reason = "local_minimum"
    while max_sweeps is None or sweeps < max_sweeps:
        sweeps += 1
        is_center = np.zeros(N, dtype=bool)
        is_center[state.centers] = True
        candidates = np.flatnonzero(~is_center)
        everyone = np.arange(N)
        sums = np.empty((K, candidates.size))
        for j, ip in enumerate(candidates):
            sums[:, j] = _swap_deltas(state, space.dist(ip, everyone), K, psi)
        report.n_evaluations += sums.size
        flat = int(np.argmin(sums))  # row-major: lowest kp, then lowest ip
        if not sums.flat[flat] < 0:
            break
        best = (float(sums.flat[flat]), (flat // candidates.size, int(candidates[flat % candidates.size])))
        kp, ip = best[1]
        centers = state.centers.copy()
        centers[kp] = ip
        state = rebuild_state(centers, space, psi)
        report.accepted.append((report.n_evaluations, kp, ip, best[0] / N))
        report.energy_trace.append(state.energy)
    else:
        report.stop_reason = "max_sweeps"
    report.n_iterations = sweeps
    report.n_implementations = len(report.accepted)
    report.final_energy = state.energy
    report.wall_time = time.perf_counter() - t0
    report.distance_counts = {"run": _counts(space, before)}
    return state, report
