"""K-means seeding: uniform, k-means++, Bradley-Fayyad and swap-search pipelines."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import DENSE
from .lloyd import mse_of, run_lloyd
from .metrics import MetricSpace

SEEDING_METHODS = ("uni", "kmpp", "bf", "clarans", "kmpp-clarans")


def _rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def seed_uni(n_samples: int, n_clusters: int, rng=None) -> np.ndarray:
    """K distinct sample indices drawn uniformly without replacement."""
    if n_clusters > n_samples:
        raise ValueError(f"cannot pick {n_clusters} centers from {n_samples} samples")
    if n_clusters < 1:
        raise ValueError("n_clusters must be >= 1")
    return _rng(rng).choice(n_samples, n_clusters, replace=False)


def seed_kmpp(space: MetricSpace, n_clusters: int, rng=None) -> np.ndarray:
    """k-means++: each new center drawn with probability proportional to dist**2.

    Uses one pass over the data per chosen center (``K*N`` distances). When all
    unchosen samples coincide with chosen centers the next center is drawn
    uniformly among the unchosen ones.
    """
    rng = _rng(rng)
    N = space.n_samples
    if n_clusters > N:
        raise ValueError(f"cannot pick {n_clusters} centers from {N} samples")
    if n_clusters < 1:
        raise ValueError("n_clusters must be >= 1")
    everyone = np.arange(N)
    chosen = np.empty(n_clusters, dtype=np.intp)
    taken = np.zeros(N, dtype=bool)
    chosen[0] = rng.integers(N)
    taken[chosen[0]] = True
    nearest = space.dist(chosen[0], everyone)
    for k in range(1, n_clusters):
        w = nearest * nearest
        w[taken] = 0.0
        cum = np.cumsum(w)
        total = cum[-1]
        if total > 0:
            r = rng.random() * total
            c = int(np.searchsorted(cum, r, side="right"))
            c = min(c, N - 1)
            # guard against landing on a zero-weight tail through rounding
            while w[c] == 0.0:
                c -= 1
        else:
            free = np.flatnonzero(~taken)
            c = int(free[rng.integers(free.size)])
        chosen[k] = c
        taken[c] = True
        np.minimum(nearest, space.dist(c, everyone), out=nearest)
    return chosen


def kmpp_weights(space: MetricSpace, chosen) -> np.ndarray:
    """Exact probabilities of the next k-means++ pick given already chosen centers."""
    chosen = np.asarray(chosen, dtype=np.intp)
    D = np.min([space.dist(c, np.arange(space.n_samples), count=False) for c in chosen], axis=0)
    w = D * D
    w[chosen] = 0.0
    return w / w.sum()


def seed_bf(X, n_clusters: int, rng=None, n_partitions: int = 10) -> np.ndarray:
    """Bradley-Fayyad refinement; returns ``K`` points, not sample indices.

    The samples are split at random into ``n_partitions`` near-equal parts.
    Each part is clustered with uniform seeding plus Lloyd, the resulting
    center sets are pooled, and Lloyd is run on the pool once from each set.
    The set with the lowest pooled MSE is returned (first on ties).
    """
    if hasattr(X, "kind"):
        if X.kind != DENSE:
            raise ValueError("bf seeding requires dense vector data")
        X = X.samples
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("bf seeding requires dense vector data")
    J = int(n_partitions)
    if J < 2:
        raise ValueError("bf needs at least 2 partitions")
    N = X.shape[0]
    if N < J * n_clusters:
        raise ValueError(f"bf needs at least {J * n_clusters} samples, got {N}")
    rng = _rng(rng)
    perm = rng.permutation(N)
    subs = rng.spawn(J)
    candidates = []
    for j in range(J):
        part = X[perm[j::J]]
        init = seed_uni(part.shape[0], n_clusters, subs[j])
        candidates.append(run_lloyd(part, init).centers)
    pool = np.concatenate(candidates)
    best, best_mse = None, np.inf
    for cand in candidates:
        res = run_lloyd(pool, cand)
        if res.mse < best_mse:
            best, best_mse = res.centers, res.mse
    return best


@dataclass
class SeedResult:
    method: str
    indices: np.ndarray | None
    points: np.ndarray | None
    clarans_report: object = None
    timings: dict = field(default_factory=dict)


def seed_pipeline(space: MetricSpace, n_clusters: int, method: str = "kmpp", seed=0,
                  potential="quadratic", level: int = 2, stop=None,
                  n_partitions: int = 10) -> SeedResult:
    """Initial centers for ``method`` in :data:`SEEDING_METHODS`.

    ``kmpp-clarans`` hands the k-means++ indices to the swap search as its
    starting centers. ``stop`` configures the swap search.
    """
    from .clarans import ClaransEngine, StopCriterion

    if method not in SEEDING_METHODS:
        raise ValueError(f"unknown seeding method {method!r}; choose from {SEEDING_METHODS}")
    N = space.n_samples
    rng = np.random.default_rng(seed)
    if method == "uni":
        return SeedResult(method, seed_uni(N, n_clusters, rng), None)
    if method == "kmpp":
        return SeedResult(method, seed_kmpp(space, n_clusters, rng), None)
    if method == "bf":
        return SeedResult(method, None, seed_bf(space.data, n_clusters, rng, n_partitions))
    start = None
    if method == "kmpp-clarans":
        start = seed_kmpp(space, n_clusters, rng)
    engine = ClaransEngine(space, potential, n_clusters, level=level, centers=start,
                           seed=seed)
    report = engine.run(stop or StopCriterion())
    report.distance_counts = {p: dict(c) for p, c in engine.counts.items()}
    return SeedResult(method, engine.centers.copy(), None, report)


def seed_mse(space: MetricSpace, result: SeedResult) -> float:
    """Mean squared Euclidean distance to the nearest initial center (dense data)."""
    X = space.data.samples
    centers = result.points if result.points is not None else X[result.indices]
    return mse_of(X, centers)
