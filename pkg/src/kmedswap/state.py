"""Clustering state shared by every K-medoids algorithm.

A :class:`ClusterState` caches, for each sample, its nearest and second nearest
centers (``a1``/``a2``) with distances (``d1``/``d2``), plus per-cluster
statistics used by the triangle-inequality tests of the swap engine. Distances
are kept in metric units; the potential is applied when accounting energy.

Ties in nearest-center assignment go to the lowest cluster index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .metrics import MetricSpace
from .potentials import Potential


class EmptyClusterError(ValueError):
    """Raised when a medoid is requested for a cluster with no members."""


@dataclass
class ClusterState:
    centers: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    e1: np.ndarray
    margins: np.ndarray
    sizes: np.ndarray = field(init=False)
    max_d1: np.ndarray = field(init=False)
    max_d2: np.ndarray = field(init=False)
    mean_margin: np.ndarray = field(init=False)
    cluster_energy: np.ndarray = field(init=False)
    members: list = field(init=False)
    cc: np.ndarray | None = None

    def __post_init__(self):
        self.refresh_statistics()

    @property
    def n_clusters(self) -> int:
        return self.centers.size

    @property
    def n_samples(self) -> int:
        return self.a1.size

    @property
    def energy(self) -> float:
        """Mean energy over samples, from the cached nearest distances."""
        return math.fsum(self.e1) / self.n_samples

    def refresh_statistics(self) -> None:
        """Recompute N(k), D1(k), D2(k), M*(k), cluster energies and member lists."""
        K = self.centers.size
        a1 = self.a1
        self.sizes = np.bincount(a1, minlength=K)
        self.max_d1 = np.zeros(K)
        np.maximum.at(self.max_d1, a1, self.d1)
        self.max_d2 = np.zeros(K)
        np.maximum.at(self.max_d2, a1, self.d2)
        margin_sum = np.bincount(a1, weights=self.margins, minlength=K)
        with np.errstate(invalid="ignore", divide="ignore"):
            self.mean_margin = np.where(self.sizes > 0, margin_sum / np.maximum(self.sizes, 1), 0.0)
        self.cluster_energy = np.bincount(a1, weights=self.e1, minlength=K)
        order = np.argsort(a1, kind="stable")
        self.members = np.split(order, np.cumsum(self.sizes)[:-1])

    def copy(self) -> "ClusterState":
        return ClusterState(
            centers=self.centers.copy(),
            a1=self.a1.copy(),
            a2=self.a2.copy(),
            d1=self.d1.copy(),
            d2=self.d2.copy(),
            e1=self.e1.copy(),
            margins=self.margins.copy(),
            cc=None if self.cc is None else self.cc.copy(),
        )

    def labels(self) -> np.ndarray:
        return self.a1.copy()

    def same_as(self, other: "ClusterState") -> bool:
        """Exact equality of centers, assignments and distances."""
        return (
            np.array_equal(self.centers, other.centers)
            and np.array_equal(self.a1, other.a1)
            and np.array_equal(self.a2, other.a2)
            and np.array_equal(self.d1, other.d1)
            and np.array_equal(self.d2, other.d2)
        )


def _check_centers(centers, n_samples, min_k=2) -> np.ndarray:
    centers = np.asarray(centers, dtype=np.intp).ravel()
    if centers.size < min_k:
        raise ValueError(f"need at least {min_k} centers, got {centers.size}")
    if np.unique(centers).size != centers.size:
        raise ValueError("center indices must be distinct")
    if centers.min() < 0 or centers.max() >= n_samples:
        raise ValueError("center index out of range")
    return centers


def top_two(dist: np.ndarray):
    """Nearest and second nearest column of each row, ties to the lowest column."""
    order = np.argsort(dist, axis=1, kind="stable")[:, :2]
    rows = np.arange(dist.shape[0])
    return order[:, 0], order[:, 1], dist[rows, order[:, 0]], dist[rows, order[:, 1]]


def center_distances(space: MetricSpace, centers, samples=None, count: bool = True) -> np.ndarray:
    """``len(samples) x K`` matrix of sample-to-center distances."""
    if samples is None:
        samples = np.arange(space.n_samples)
    return space.dist_block(centers, samples, count=count)


def inter_center_distances(space: MetricSpace, centers, count: bool = True) -> np.ndarray:
    K = len(centers)
    cc = np.zeros((K, K))
    for k in range(K - 1):
        row = space.dist(centers[k], centers[k + 1:], count=count)
        cc[k, k + 1:] = row
        cc[k + 1:, k] = row
    return cc


def rebuild_state(centers, space: MetricSpace, potential: Potential, with_cc: bool = False,
                  count: bool = True) -> ClusterState:
    """Build a full :class:`ClusterState` from scratch (N x K distances)."""
    centers = _check_centers(centers, space.n_samples)
    D = center_distances(space, centers, count=count)
    a1, a2, d1, d2 = top_two(D)
    e1 = potential(d1)
    margins = potential(d2) - e1
    cc = inter_center_distances(space, centers, count=count) if with_cc else None
    return ClusterState(centers=centers.copy(), a1=a1, a2=a2, d1=d1, d2=d2, e1=e1,
                        margins=margins, cc=cc)


def assign_nearest(centers, space: MetricSpace, count: bool = True):
    """Nearest center index and distance for every sample (lowest index on ties)."""
    centers = np.asarray(centers, dtype=np.intp)
    D = center_distances(space, centers, count=count)
    a1 = np.argmin(D, axis=1)
    return a1, D[np.arange(D.shape[0]), a1]


def total_energy(centers, space: MetricSpace, potential: Potential) -> float:
    """Mean over samples of psi(distance to the nearest center), from scratch.

    ``centers`` may also be a :class:`ClusterState`; its cached distances are
    ignored. Distances computed here are not counted.
    """
    if isinstance(centers, ClusterState):
        centers = centers.centers
    centers = np.asarray(centers, dtype=np.intp)
    D = center_distances(space, centers, count=False)
    return math.fsum(potential(D.min(axis=1))) / space.n_samples


def medoid_costs(members, space: MetricSpace, potential: Potential, count: bool = True) -> np.ndarray:
    members = np.asarray(members, dtype=np.intp)
    return np.array([math.fsum(potential(space.dist(i, members, count=count))) for i in members])


def cluster_medoid(members, space: MetricSpace, potential: Potential, count: bool = True) -> int:
    """Member minimising the summed energy to all other members.

    Ties go to the lowest sample index.
    """
    members = np.sort(np.asarray(members, dtype=np.intp).ravel())
    if members.size == 0:
        raise EmptyClusterError("cluster has no members")
    if members.size == 1:
        return int(members[0])
    costs = medoid_costs(members, space, potential, count=count)
    return int(members[int(np.argmin(costs))])
