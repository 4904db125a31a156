"""Swap-based K-medoids search with triangle-inequality accelerations.

The engine repeatedly proposes replacing the center of a random cluster
``kp`` with a random non-center sample ``ip``, evaluates the exact change in
mean energy, and implements the swap when the energy strictly decreases. It
stops after a run of consecutive rejections (``K**2`` by default), a number of
accepted swaps, or a time budget.

Optimisation levels change only how many distances are computed:

====== =================================================================
level  cached quantities
====== =================================================================
-2     nothing; every evaluation computes all sample-to-center distances
-1     nearest center of each sample
 0     nearest and second nearest centers
 1     plus per-cluster radii ``D1``/``D2`` and mean margins (bound tests)
 2     plus the K x K inter-center distance matrix
 3     level 2 with sub-sampled early rejection of unpromising proposals
====== =================================================================

Levels -2 to 2 make identical decisions: each per-sample energy change is
computed from the same floating point values at every level and the total is
reduced with :func:`math.fsum`, which is exact and order independent.
"""

from __future__ import annotations

import math
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .metrics import MetricSpace
from .potentials import Potential, get_potential
from .state import (
    ClusterState,
    _check_centers,
    assign_nearest,
    center_distances,
    rebuild_state,
    top_two,
)

LEVELS = (-2, -1, 0, 1, 2, 3)
PHASES = ("init", "evaluate", "implement", "final")

# Relative slack on every triangle-inequality test. Rounding may then only keep
# extra samples in play, so bounded levels agree exactly with brute force.
_SLACK = 1.0 + 1e-9


class SwapProposal(NamedTuple):
    """Replace the center of cluster ``kp`` by sample ``ip``."""

    kp: int
    ip: int


class Level3Decision(NamedTuple):
    accept: bool
    delta: float | None
    n_sampled: int


@dataclass
class StopCriterion:
    """When to stop proposing swaps; the first criterion to fire wins.

    ``max_rejections`` defaults to ``K**2`` consecutive rejections.
    """

    max_rejections: int | None = None
    max_swaps: int | None = None
    time_limit: float | None = None
    max_evaluations: int | None = None

    def __post_init__(self):
        if self.max_rejections is not None and self.max_rejections < 1:
            raise ValueError("max_rejections must be >= 1")
        if self.time_limit is not None and self.time_limit < 0:
            raise ValueError("time_limit must be >= 0")


@dataclass
class EngineConfig:
    n_clusters: int
    level: int = 2
    seed: int | None = 0
    stop: StopCriterion = field(default_factory=StopCriterion)
    level3_min_sample_factor: int = 30
    init: object = "random"
    use_thresholds: bool = True

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ValueError(f"level must be one of {LEVELS}, got {self.level}")
        if self.level3_min_sample_factor < 1:
            raise ValueError("level3_min_sample_factor must be >= 1")


@dataclass
class RunReport:
    """What happened during one run of a K-medoids algorithm."""

    algorithm: str
    n_clusters: int
    level: int | None = None
    initial_energy: float = float("nan")
    final_energy: float = float("nan")
    energy_trace: list = field(default_factory=list)
    n_evaluations: int = 0
    n_implementations: int = 0
    rejection_trace: list = field(default_factory=list)
    accepted: list = field(default_factory=list)
    distance_counts: dict = field(default_factory=dict)
    wall_time: float = 0.0
    stop_reason: str = ""
    n_iterations: int = 0
    trailing_rejections: int = 0

    @property
    def total_distance_calls(self) -> int:
        """Distance evaluations spent on the search itself (``final`` excluded)."""
        return sum(
            c["full"] + c["aborted"]
            for phase, c in self.distance_counts.items()
            if phase != "final"
        )

    @property
    def acceptance_rate(self) -> float:
        """Fraction of evaluated proposals that reduced the energy."""
        if self.n_evaluations == 0:
            return 0.0
        return self.n_implementations / self.n_evaluations

    def to_dict(self) -> dict:
        d = asdict(self)
        d["accepted"] = [list(a) for a in self.accepted]
        d["total_distance_calls"] = self.total_distance_calls
        return d


def _top2_of_three(dA, kA, dB, kB, dC, kC):
    D = np.stack([dA, dB, dC], axis=1)
    Kx = np.stack([kA, kB, kC], axis=1)
    order = np.lexsort((Kx, D), axis=1)[:, :2]
    rows = np.arange(D.shape[0])[:, None]
    kk = Kx[rows, order]
    dd = D[rows, order]
    return kk[:, 0], kk[:, 1], dd[:, 0], dd[:, 1]


def subsample_screen(
    delta_fn: Callable[[np.ndarray], np.ndarray],
    n_population: int,
    n_initial: int,
    rng: np.random.Generator,
    known: float = 0.0,
):
    """Early-rejection test on a growing uniform sample of per-sample deltas.

    ``delta_fn(positions)`` returns the energy changes of the given population
    positions. The estimate of the total change is ``known`` plus the sample
    mean scaled to the population; while it is negative the sample doubles.
    Returns ``(completed, deltas, n_sampled)``: ``completed`` is False when
    the proposal was rejected on a partial sample, otherwise ``deltas`` holds
    the change of every population member (in sampling order).
    """
    if n_initial >= n_population:
        pos = np.arange(n_population)
        return True, delta_fn(pos), n_population
    perm = rng.permutation(n_population)
    deltas = np.empty(n_population)
    done = 0
    n_s = n_initial
    while n_s < n_population:
        deltas[done:n_s] = delta_fn(perm[done:n_s])
        done = n_s
        estimate = known + n_population * math.fsum(deltas[:n_s]) / n_s
        if estimate >= 0:
            return False, None, n_s
        n_s = min(n_population, 2 * n_s)
    deltas[done:] = delta_fn(perm[done:])
    return True, deltas, n_population


class ClaransEngine:
    """Mutable search state for one run at a fixed optimisation level.

    Parameters
    ----------
    space : MetricSpace
    potential : Potential or str
    n_clusters : int
        Must be at least 2 and below the number of samples.
    level : int, default=2
    centers : array-like of int, optional
        Initial center indices; drawn uniformly without replacement if None.
    seed : int or None
        Seeds three independent streams: initial centers, proposals and
        level-3 sub-sampling.
    """

    def __init__(self, space: MetricSpace, potential, n_clusters: int, level: int = 2,
                 centers=None, seed=0, level3_min_sample_factor: int = 30,
                 use_thresholds: bool = True):
        if level not in LEVELS:
            raise ValueError(f"level must be one of {LEVELS}, got {level}")
        self.space = space
        self.psi = get_potential(potential)
        self.level = level
        N = space.n_samples
        K = int(n_clusters)
        if K < 2:
            raise ValueError("n_clusters must be at least 2")
        if N <= K:
            raise ValueError(f"need more samples ({N}) than clusters ({K}) to propose swaps")
        self.N, self.K = N, K
        self.factor = int(level3_min_sample_factor)
        self.use_thresholds = bool(use_thresholds) and space.supports_threshold
        init_ss, prop_ss, sub_ss = np.random.SeedSequence(seed).spawn(3)
        self.rng = np.random.default_rng(prop_ss)
        self.sub_rng = np.random.default_rng(sub_ss)
        if centers is None:
            centers = np.random.default_rng(init_ss).choice(N, K, replace=False)
        centers = _check_centers(centers, N)
        if centers.size != K:
            raise ValueError(f"expected {K} initial centers, got {centers.size}")
        self.centers = centers.copy()
        self.noncenters = np.setdiff1d(np.arange(N), centers)
        self.pos = np.full(N, -1, dtype=np.intp)
        self.pos[self.noncenters] = np.arange(self.noncenters.size)

        self.counts = {p: {"full": 0, "aborted": 0} for p in PHASES}
        self.n_evaluations = 0
        self.n_implementations = 0
        self._cache = None
        self.state: ClusterState | None = None
        with self.phase("init"):
            if level >= 0:
                self.state = rebuild_state(centers, space, self.psi, with_cc=level >= 2)
                self.energy = self.state.energy
            else:
                a1, d1 = assign_nearest(centers, space)
                self.energy = math.fsum(self.psi(d1)) / N
                if level == -1:
                    self.a1, self.d1 = a1, d1
                    self.e1 = self.psi(d1)

    # -------------------------------------------------------------- plumbing

    @contextmanager
    def phase(self, name):
        before = self.space.counter.snapshot()
        try:
            yield
        finally:
            full, aborted = self.space.counter.snapshot()
            self.counts[name]["full"] += full - before[0]
            self.counts[name]["aborted"] += aborted - before[1]

    def _dist(self, i, idx, thresholds=None):
        if not self.use_thresholds:
            thresholds = None
        return self.space.dist(i, idx, thresholds=thresholds)

    def _commit_centers(self, kp, ip):
        old = self.centers[kp]
        j = self.pos[ip]
        self.noncenters[j] = old
        self.pos[old] = j
        self.pos[ip] = -1
        self.centers[kp] = ip

    def propose(self) -> SwapProposal:
        """Uniform cluster index and uniform non-center sample."""
        kp = int(self.rng.integers(self.K))
        ip = int(self.noncenters[self.rng.integers(self.N - self.K)])
        return SwapProposal(kp, ip)

    def _check_proposal(self, kp, ip):
        if not 0 <= kp < self.K:
            raise ValueError(f"cluster index {kp} out of range")
        if not 0 <= ip < self.N or self.pos[ip] < 0:
            raise ValueError(f"sample {ip} is already a center or out of range")

    # -------------------------------------------------------------- evaluation

    def evaluate_swap(self, proposal) -> float:
        """Exact change in mean energy if ``proposal`` were implemented."""
        kp, ip = int(proposal[0]), int(proposal[1])
        self._check_proposal(kp, ip)
        with self.phase("evaluate"):
            if self.level == -2:
                return self._eval_m2(kp, ip)
            if self.level == -1:
                return self._eval_m1(kp, ip)
            if self.level == 0:
                return self._eval_0(kp, ip)
            known, pool, dpp, dpk = self._bounded_setup(kp, ip, 1 if self.level == 1 else 2)
            deltas = self._pool_deltas(kp, ip, pool, dpp, dpk)
            return math.fsum(np.concatenate([known, deltas])) / self.N

    def _eval_m2(self, kp, ip):
        psi = self.psi
        D = center_distances(self.space, self.centers)
        d = self.space.dist(ip, np.arange(self.N))
        old = D.min(axis=1)
        rest = np.delete(D, kp, axis=1).min(axis=1)
        new = np.minimum(rest, d)
        e_new = psi(new)
        self._cache = (kp, ip, e_new)
        return math.fsum(e_new - psi(old)) / self.N

    def _eval_m1(self, kp, ip):
        psi = self.psi
        d = self.space.dist(ip, np.arange(self.N))
        mem = np.flatnonzero(self.a1 == kp)
        new_centers = self.centers.copy()
        new_centers[kp] = ip
        D = np.empty((mem.size, self.K))
        rest = np.arange(self.K) != kp
        D[:, rest] = self.space.dist_block(new_centers[rest], mem)
        D[:, kp] = d[mem]
        new_a1 = np.argmin(D, axis=1)
        new_d1 = D[np.arange(mem.size), new_a1]
        others = self.a1 != kp
        closer = others & (d < self.d1)
        delta = np.zeros(self.N)
        delta[closer] = psi(d[closer]) - self.e1[closer]
        delta[mem] = psi(new_d1) - self.e1[mem]
        self._cache = (kp, ip, (d, mem, new_a1, new_d1))
        return math.fsum(delta) / self.N

    def _eval_0(self, kp, ip):
        st, psi = self.state, self.psi
        is_kp = st.a1 == kp
        thr = np.where(is_kp, st.d2, st.d1)
        d = self._dist(ip, np.arange(self.N), thresholds=thr)
        pd = psi(d)
        delta = np.where(
            is_kp,
            np.where(d >= st.d2, st.margins, pd - st.e1),
            np.where(d < st.d1, pd - st.e1, 0.0),
        )
        self._cache = (kp, ip, None)
        return math.fsum(delta) / self.N

    def _bounded_setup(self, kp, ip, level):
        """Cluster-wise bound tests: which clusters can contribute to the change.

        Returns the exactly known per-sample changes, the pool of samples whose
        change still has to be examined, the distance from ``ip`` to the old
        center of ``kp``, and distances from ``ip`` to centers (``inf`` where
        not computed).
        """
        st = self.state
        c = self.centers
        if level == 1:
            dpk = self.space.dist(ip, c)
            dpp = float(dpk[kp])
            near = dpk < 2.0 * st.max_d1 * _SLACK
        else:
            a1ip, d1ip = st.a1[ip], st.d1[ip]
            dpp = float(d1ip) if a1ip == kp else self.space.dist_pair(ip, c[kp])
            dpk = np.full(self.K, np.inf)
            maybe = st.cc[a1ip] < (2.0 * st.max_d1 + d1ip) * _SLACK
            maybe[kp] = False
            cand = np.flatnonzero(maybe)
            dpk[cand] = self.space.dist(ip, c[cand])
            dpk[kp] = dpp
            near = dpk < 2.0 * st.max_d1 * _SLACK
        near[kp] = False
        self._cache = (kp, ip, dpk)
        parts = [st.members[k] for k in np.flatnonzero(near)]
        kp_mem = st.members[kp]
        if dpp > (st.max_d1[kp] + st.max_d2[kp]) * _SLACK:
            known = st.margins[kp_mem]
        else:
            known = np.empty(0)
            parts.insert(0, kp_mem)
        pool = np.concatenate(parts) if parts else np.empty(0, dtype=np.intp)
        return known, pool, dpp, dpk

    def _pool_deltas(self, kp, ip, idx, dpp, dpk):
        """Per-sample energy changes for samples of non-eliminated clusters."""
        st, psi = self.state, self.psi
        out = np.zeros(idx.size)
        if idx.size == 0:
            return out
        a1 = st.a1[idx]
        d1 = st.d1[idx]
        d2 = st.d2[idx]
        is_kp = a1 == kp
        skip = np.where(is_kp, dpp > (d1 + d2) * _SLACK, dpk[a1] > 2.0 * d1 * _SLACK)
        fall = skip & is_kp
        out[fall] = st.margins[idx[fall]]
        need = ~skip
        sub = idx[need]
        if sub.size:
            nk = is_kp[need]
            d = self._dist(ip, sub, thresholds=np.where(nk, d2[need], d1[need]))
            pd = psi(d)
            e1 = st.e1[sub]
            out[need] = np.where(
                nk,
                np.where(d >= d2[need], st.margins[sub], pd - e1),
                np.where(d < d1[need], pd - e1, 0.0),
            )
        return out

    def evaluate_swap_level3(self, proposal) -> Level3Decision:
        """Sub-sampled evaluation; rejections may be wrong, acceptances never are.

        The first sample has ``level3_min_sample_factor`` times as many samples
        as there are non-eliminated clusters, drawn without replacement from
        their members, and doubles while the estimated change stays negative.
        A swap is only accepted once the exact change over all samples is known
        to be negative.
        """
        kp, ip = int(proposal[0]), int(proposal[1])
        self._check_proposal(kp, ip)
        if self.state is None or self.state.cc is None:
            raise RuntimeError("level-3 evaluation needs a level >= 2 state")
        with self.phase("evaluate"):
            known, pool, dpp, dpk = self._bounded_setup(kp, ip, 2)
            st = self.state
            n_clusters_left = np.unique(st.a1[pool]).size if pool.size else 0
            completed, deltas, n_used = subsample_screen(
                lambda pos: self._pool_deltas(kp, ip, pool[pos], dpp, dpk),
                pool.size,
                self.factor * n_clusters_left,
                self.sub_rng,
                known=math.fsum(known),
            )
            if not completed:
                return Level3Decision(False, None, n_used)
            delta = math.fsum(np.concatenate([known, deltas])) / self.N
            return Level3Decision(delta < 0, delta, n_used)

    # -------------------------------------------------------------- implementation

    def implement_swap(self, proposal, validate: bool = False) -> None:
        """Replace the center of ``kp`` by ``ip`` and repair all cached state.

        With ``validate=True`` the proposal is first evaluated and a
        ``ValueError`` is raised unless it strictly lowers the energy.
        """
        kp, ip = int(proposal[0]), int(proposal[1])
        self._check_proposal(kp, ip)
        if validate:
            delta = self.evaluate_swap((kp, ip))
            if not delta < 0:
                raise ValueError(f"swap {(kp, ip)} does not reduce the energy (delta={delta})")
        cache = self._cache if self._cache is not None and self._cache[:2] == (kp, ip) else None
        with self.phase("implement"):
            if self.level == -2:
                if cache is None:
                    self._eval_m2(kp, ip)
                    cache = self._cache
                self._commit_centers(kp, ip)
                self.energy = math.fsum(cache[2]) / self.N
            elif self.level == -1:
                if cache is None:
                    self._eval_m1(kp, ip)
                    cache = self._cache
                self._implement_m1(kp, ip, cache[2])
            elif self.level == 0:
                self._implement_0(kp, ip)
            else:
                dpk = cache[2] if cache is not None else None
                self._implement_bounded(kp, ip, 1 if self.level == 1 else 2, dpk)
        self._cache = None
        self.n_implementations += 1

    def _implement_m1(self, kp, ip, payload):
        d, mem, new_a1, new_d1 = payload
        a1, d1 = self.a1, self.d1
        others = a1 != kp
        take = others & ((d < d1) | ((d == d1) & (kp < a1)))
        a1[take] = kp
        d1[take] = d[take]
        a1[mem] = new_a1
        d1[mem] = new_d1
        self.e1 = self.psi(d1)
        self._commit_centers(kp, ip)
        self.energy = math.fsum(self.e1) / self.N

    def _apply(self, idx, a1, a2, d1, d2):
        st = self.state
        st.a1[idx] = a1
        st.a2[idx] = a2
        st.d1[idx] = d1
        st.d2[idx] = d2
        e1 = self.psi(d1)
        st.e1[idx] = e1
        st.margins[idx] = self.psi(d2) - e1

    def _scratch(self, idx):
        """Nearest two centers of ``idx`` computed against every center."""
        if idx.size:
            self._apply(idx, *top_two(center_distances(self.space, self.centers, idx)))

    def _subset_update(self, idx, d, kp):
        """Top two of old nearest, old second nearest and the new center."""
        if idx.size == 0:
            return
        st = self.state
        kk = np.full(idx.size, kp)
        a1, a2, d1, d2 = _top2_of_three(st.d1[idx], st.a1[idx], st.d2[idx], st.a2[idx], d, kk)
        self._apply(idx, a1, a2, d1, d2)

    def _warmstart(self, idx, dA, kA, dB, kB):
        """Nearest two centers, skipping centers provably beyond two known distances."""
        n = idx.size
        if n == 0:
            return
        st = self.state
        cc = st.cc
        rows = np.arange(n)
        T = np.maximum(dA, dB)
        lb = np.maximum(np.abs(cc[kA] - dA[:, None]), np.abs(cc[kB] - dB[:, None]))
        need = lb <= T[:, None] * _SLACK
        need[rows, kA] = False
        need[rows, kB] = False
        D = np.full((n, self.K), np.inf)
        D[rows, kA] = dA
        D[rows, kB] = dB
        for k in np.flatnonzero(need.any(axis=0)):
            r = np.flatnonzero(need[:, k])
            D[r, k] = self.space.dist(self.centers[k], idx[r])
        self._apply(idx, *top_two(D))

    def _implement_0(self, kp, ip):
        st = self.state
        self._commit_centers(kp, ip)
        touched = (st.a1 == kp) | (st.a2 == kp)
        A = np.flatnonzero(touched)
        B = np.flatnonzero(~touched)
        self._scratch(A)
        self._subset_update(B, self.space.dist(ip, B), kp)
        st.centers = self.centers.copy()
        st.refresh_statistics()
        self.energy = st.energy

    def _implement_bounded(self, kp, ip, level, dpk):
        st = self.state
        c = self.centers
        K = self.K
        others = np.arange(K) != kp
        if dpk is None:
            dpk = np.full(K, np.inf)
        dc_new = np.array(dpk, dtype=np.float64)
        missing = np.flatnonzero(~np.isfinite(dc_new) & others)
        if missing.size:
            dc_new[missing] = self.space.dist(ip, c[missing])
        if level == 1:
            dc_old = np.zeros(K)
            dc_old[others] = self.space.dist(c[kp], c[others])
        else:
            dc_old = st.cc[kp].copy()
        dmin = np.minimum(dc_old, dc_new)
        kp_mem = st.members[kp]
        cand = np.flatnonzero(others & (dmin <= (st.max_d1 + st.max_d2) * _SLACK))
        idx = np.concatenate([st.members[k] for k in cand]) if cand.size else np.empty(0, np.intp)
        idx = idx[dmin[st.a1[idx]] <= (st.d1[idx] + st.d2[idx]) * _SLACK]
        # samples losing their second center must be refreshed whatever the bounds say
        lost = np.flatnonzero((st.a2 == kp) & (st.a1 != kp))
        idx = np.union1d(idx, lost)
        a2kp = st.a2[idx] == kp
        A = idx[a2kp]
        B = idx[~a2kp]

        self._commit_centers(kp, ip)
        if level >= 2:
            row = dc_new.copy()
            row[kp] = 0.0
            st.cc[kp, :] = row
            st.cc[:, kp] = row
        # snapshot the old records needed as warm-start references before overwriting
        kp_d2, kp_a2 = st.d2[kp_mem].copy(), st.a2[kp_mem].copy()
        A_d1, A_a1 = st.d1[A].copy(), st.a1[A].copy()
        if level == 1:
            self._scratch(kp_mem)
            self._scratch(A)
        else:
            d_kp = self.space.dist(ip, kp_mem)
            d_A = self.space.dist(ip, A)
            self._warmstart(kp_mem, d_kp, np.full(kp_mem.size, kp), kp_d2, kp_a2)
            self._warmstart(A, d_A, np.full(A.size, kp), A_d1, A_a1)
        self._subset_update(B, self.space.dist(ip, B), kp)
        st.centers = self.centers.copy()
        st.refresh_statistics()
        self.energy = st.energy

    # -------------------------------------------------------------- driver

    def current_state(self) -> ClusterState:
        """Full state for the current centers (rebuilt for levels below 0)."""
        if self.state is not None:
            return self.state
        with self.phase("final"):
            return rebuild_state(self.centers, self.space, self.psi)

    def run(self, stop: StopCriterion | None = None) -> RunReport:
        stop = stop or StopCriterion()
        max_rej = stop.max_rejections if stop.max_rejections is not None else self.K ** 2
        report = RunReport(algorithm="clarans", n_clusters=self.K, level=self.level,
                           initial_energy=self.energy)
        report.energy_trace.append(self.energy)
        t0 = time.perf_counter()
        consecutive = 0
        n_eval = 0
        while True:
            if stop.time_limit is not None and time.perf_counter() - t0 >= stop.time_limit:
                report.stop_reason = "time_limit"
                break
            if consecutive >= max_rej:
                report.stop_reason = "max_rejections"
                break
            if stop.max_swaps is not None and self.n_implementations >= stop.max_swaps:
                report.stop_reason = "max_swaps"
                break
            if stop.max_evaluations is not None and n_eval >= stop.max_evaluations:
                report.stop_reason = "max_evaluations"
                break
            proposal = self.propose()
            n_eval += 1
            if self.level == 3:
                decision = self.evaluate_swap_level3(proposal)
                accept, delta = decision.accept, decision.delta
            else:
                delta = self.evaluate_swap(proposal)
                accept = delta < 0
            if accept:
                self.implement_swap(proposal)
                report.accepted.append((n_eval, proposal.kp, proposal.ip, delta))
                report.rejection_trace.append(consecutive)
                report.energy_trace.append(self.energy)
                consecutive = 0
            else:
                consecutive += 1
        self.n_evaluations += n_eval
        report.wall_time = time.perf_counter() - t0
        report.n_evaluations = n_eval
        report.n_implementations = len(report.accepted)
        report.final_energy = self.energy
        report.trailing_rejections = consecutive
        return report


def _initial_centers(init, space, n_clusters, seed):
    if isinstance(init, str):
        if init == "random":
            return None
        if init in ("k-means++", "kmpp"):
            from .seeding import seed_kmpp
            ss = np.random.SeedSequence(seed).spawn(4)[3]
            return seed_kmpp(space, n_clusters, np.random.default_rng(ss))
        raise ValueError(f"unknown init {init!r}")
    return np.asarray(init, dtype=np.intp)


def run_clarans(space: MetricSpace, potential, config: EngineConfig):
    """Run the swap search to completion; returns ``(ClusterState, RunReport)``."""
    potential = get_potential(potential)
    centers = _initial_centers(config.init, space, config.n_clusters, config.seed)
    engine = ClaransEngine(
        space, potential, config.n_clusters, level=config.level, centers=centers,
        seed=config.seed, level3_min_sample_factor=config.level3_min_sample_factor,
        use_thresholds=config.use_thresholds,
    )
    report = engine.run(config.stop)
    state = engine.current_state()
    if state.cc is None and config.level >= 2:
        raise AssertionError("level >= 2 state lost its inter-center matrix")
    report.distance_counts = {p: dict(c) for p, c in engine.counts.items()}
    return state, report
