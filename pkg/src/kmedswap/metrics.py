"""Metric spaces over datasets, with distance-call accounting.

All metrics here satisfy the triangle inequality, which the bound tests of the
accelerated swap engine depend on. Levenshtein metrics additionally support a
threshold: the banded dynamic programme stops as soon as the distance is known
to reach the threshold, which is where most of the savings on sequence data
come from.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .data import DENSE, SEQUENCE, SPARSE, Dataset

VECTOR_METRICS = ("l2", "l1", "linf")
SEQUENCE_METRICS = ("levenshtein", "normalized-levenshtein")
METRICS = VECTOR_METRICS + SEQUENCE_METRICS

_ALIASES = {
    "euclidean": "l2",
    "manhattan": "l1",
    "cityblock": "l1",
    "chebyshev": "linf",
    "nlevenshtein": "normalized-levenshtein",
    "normalized_levenshtein": "normalized-levenshtein",
}


def canonical_metric(metric: str) -> str:
    name = _ALIASES.get(metric, metric)
    if name not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {METRICS}")
    return name


class Thresholded(NamedTuple):
    """Result of a thresholded distance evaluation.

    ``exact`` is True when ``value`` is the true distance. Otherwise the
    evaluation was aborted and the distance is known to be at least ``value``
    (which then equals the threshold).
    """

    value: float
    exact: bool


# ---------------------------------------------------------------- Levenshtein


def levenshtein(a, b) -> int:
    """Plain O(len(a) * len(b)) edit distance with unit costs."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def levenshtein_banded(a, b, threshold: float) -> tuple[Thresholded, int]:
    """Edit distance restricted to a diagonal band, aborting at ``threshold``.

    Returns the result and the number of DP cells filled. The band half-width
    is the largest integer strictly below ``threshold``, so the result is exact
    whenever the distance is below the threshold and the cost is
    O(len(a) * threshold).
    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    if a == b:
        return Thresholded(0.0, True), 0
    w = math.ceil(threshold) - 1 if math.isfinite(threshold) else len(a) + len(b)
    la, lb = len(a), len(b)
    if w < 0 or abs(la - lb) > w:
        return Thresholded(float(threshold), False), 0
    big = w + 1
    prev = [big] * (lb + 2)
    cur = [big] * (lb + 2)
    hi = min(lb, w)
    for j in range(hi + 1):
        prev[j] = j
    cells = hi + 1
    for i in range(1, la + 1):
        lo = max(0, i - w)
        hi = min(lb, i + w)
        ca = a[i - 1]
        if lo == 0:
            cur[0] = i
            start = 1
            row_min = i
            cells += 1
        else:
            cur[lo - 1] = big
            start = lo
            row_min = big
        for j in range(start, hi + 1):
            v = prev[j - 1] + (ca != b[j - 1])
            t = prev[j] + 1
            if t < v:
                v = t
            t = cur[j - 1] + 1
            if t < v:
                v = t
            if v > big:
                v = big
            cur[j] = v
            if v < row_min:
                row_min = v
        cells += hi - start + 1
        if hi + 1 <= lb:
            cur[hi + 1] = big
        if row_min > w:
            return Thresholded(float(threshold), False), cells
        prev, cur = cur, prev
    v = prev[lb]
    if v <= w:
        return Thresholded(float(v), True), cells
    return Thresholded(float(threshold), False), cells


def normalized_levenshtein(a, b) -> float:
    """``2 L / (|a| + |b| + L)`` with ``L`` the edit distance; a metric in [0, 1]."""
    lev = levenshtein(a, b)
    if lev == 0:
        return 0.0
    return 2.0 * lev / (len(a) + len(b) + lev)


def normalized_levenshtein_banded(a, b, threshold: float) -> tuple[Thresholded, int]:
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    if a == b:
        return Thresholded(0.0, True), 0
    s = len(a) + len(b)
    # nld < t  <=>  L < t * s / (2 - t); nld never exceeds 1. The bound is
    # widened by a hair so rounding can never abort a pair that is below t.
    lev_threshold = math.inf if threshold > 1 else threshold * s / (2.0 - threshold) * (1 + 1e-12)
    res, cells = levenshtein_banded(a, b, lev_threshold)
    if not res.exact:
        return Thresholded(float(threshold), False), cells
    lev = res.value
    return Thresholded(2.0 * lev / (s + lev), True), cells


# ---------------------------------------------------------------- pairwise


def _check_same_kind(x, y, metric):
    if metric in SEQUENCE_METRICS:
        if not isinstance(x, (str, tuple, list)) or not isinstance(y, (str, tuple, list)):
            raise TypeError(f"{metric} needs sequence samples")
        return
    if isinstance(x, (str, tuple)) or isinstance(y, (str, tuple)):
        raise TypeError(f"{metric} needs vector samples")


def _as_vec(x):
    if sp.issparse(x):
        return np.asarray(x.toarray(), dtype=np.float64).ravel()
    return np.asarray(x, dtype=np.float64).ravel()


def distance(x, y, metric: str = "l2") -> float:
    """Distance between two samples of the same kind."""
    metric = canonical_metric(metric)
    _check_same_kind(x, y, metric)
    if metric == "levenshtein":
        return float(levenshtein(x, y))
    if metric == "normalized-levenshtein":
        return normalized_levenshtein(x, y)
    xv, yv = _as_vec(x), _as_vec(y)
    if xv.shape != yv.shape:
        raise ValueError("vectors have different dimensions")
    diff = yv - xv
    if metric == "l2":
        return float(np.sqrt(np.sum(diff * diff)))
    if metric == "l1":
        return float(np.sum(np.abs(diff)))
    return float(np.max(np.abs(diff))) if diff.size else 0.0


def distance_thresholded(x, y, metric: str, threshold: float) -> Thresholded:
    """Distance that may stop early once it is known to reach ``threshold``.

    The value is exact whenever the true distance is below the threshold.
    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    metric = canonical_metric(metric)
    _check_same_kind(x, y, metric)
    if metric == "levenshtein":
        return levenshtein_banded(x, y, threshold)[0]
    if metric == "normalized-levenshtein":
        return normalized_levenshtein_banded(x, y, threshold)[0]
    xv, yv = _as_vec(x), _as_vec(y)
    if xv.shape != yv.shape:
        raise ValueError("vectors have different dimensions")
    # running accumulation over blocks, aborting once the partial value proves d >= threshold
    block = 64
    acc = 0.0
    for start in range(0, xv.size, block):
        diff = yv[start:start + block] - xv[start:start + block]
        if metric == "l2":
            acc += float(np.sum(diff * diff))
            reached = acc >= threshold * threshold
        elif metric == "l1":
            acc += float(np.sum(np.abs(diff)))
            reached = acc >= threshold
        else:
            acc = max(acc, float(np.max(np.abs(diff))))
            reached = acc >= threshold
        if reached and start + block < xv.size:
            return Thresholded(float(threshold), False)
    return Thresholded(distance(xv, yv, metric), True)


# ---------------------------------------------------------------- accounting


@dataclass
class DistanceCounter:
    """Counts of full and threshold-aborted distance evaluations."""

    full: int = 0
    aborted: int = 0

    def __post_init__(self):
        self._lock = threading.Lock()

    def add(self, full: int = 0, aborted: int = 0) -> None:
        with self._lock:
            self.full += int(full)
            self.aborted += int(aborted)

    @property
    def total(self) -> int:
        return self.full + self.aborted

    def snapshot(self) -> tuple[int, int]:
        return self.full, self.aborted

    def reset(self) -> None:
        with self._lock:
            self.full = 0
            self.aborted = 0


_COLUMN_LOOP_MAX_DIM = 16


def _dense_dists(A: np.ndarray, C: np.ndarray, metric: str) -> np.ndarray:
    """``len(A) x len(C)`` distances between rows of ``A`` and rows of ``C``.

    Low-dimensional data accumulates one coordinate at a time (fast for tiny
    ``d``); higher dimensions reduce a broadcast difference array. Both
    :meth:`MetricSpace.dist` and :meth:`MetricSpace.dist_block` come through
    here, so a given pair always gets bitwise the same value.
    """
    n, d = A.shape
    if d == 0:
        return np.zeros((n, C.shape[0]))
    if d <= _COLUMN_LOOP_MAX_DIM:
        acc = None
        for j in range(d):
            t = A[:, j, None] - C[None, :, j]
            if metric == "l2":
                t *= t
            else:
                np.abs(t, out=t)
            if acc is None:
                acc = t
            elif metric == "linf":
                np.maximum(acc, t, out=acc)
            else:
                acc += t
        return np.sqrt(acc, out=acc) if metric == "l2" else acc
    diff = A[:, None, :] - C[None, :, :]
    if metric == "l2":
        return np.sqrt((diff * diff).sum(axis=2))
    if metric == "l1":
        return np.abs(diff).sum(axis=2)
    return np.abs(diff).max(axis=2)


class MetricSpace:
    """A dataset paired with a metric; distances are addressed by sample index.

    Every distance computed through :meth:`dist` is counted in ``counter``
    unless ``count=False``. Distances from a center to samples are always
    requested as ``dist(center, samples)`` so cached and freshly computed
    values come from the same code path and agree bitwise.
    """

    def __init__(self, data, metric: str = "l2"):
        self.data = Dataset.from_any(data)
        self.metric = canonical_metric(metric)
        if self.metric in SEQUENCE_METRICS and self.data.kind != SEQUENCE:
            raise TypeError(f"metric {self.metric!r} requires sequence data")
        if self.metric in VECTOR_METRICS and self.data.kind == SEQUENCE:
            raise TypeError(f"metric {self.metric!r} requires vector data")
        self.counter = DistanceCounter()
        self.supports_threshold = self.metric in SEQUENCE_METRICS
        if self.data.kind == SPARSE:
            self._csr = self.data.samples
        elif self.data.kind == DENSE:
            self._X = self.data.samples

    @property
    def n_samples(self) -> int:
        return self.data.n_samples

    def dist(self, i: int, idx, thresholds=None, count: bool = True) -> np.ndarray:
        """Distances from sample ``i`` to each sample in ``idx``.

        With ``thresholds`` (scalar or per-entry) and a metric that supports
        aborting, entries known to reach their threshold come back as ``inf``.
        """
        idx = np.asarray(idx, dtype=np.intp).ravel()
        n = idx.size
        if n == 0:
            return np.empty(0, dtype=np.float64)
        kind = self.data.kind
        aborted = 0
        if kind == DENSE:
            out = _dense_dists(self._X[idx], self._X[i][None, :], self.metric)[:, 0]
        elif kind == SPARSE:
            out = self._sparse_dists(i, idx)
        else:
            out, aborted = self._sequence_dists(i, idx, thresholds)
        if count:
            self.counter.add(full=n - aborted, aborted=aborted)
        return out

    def dist_block(self, centers, idx, count: bool = True) -> np.ndarray:
        """``len(idx) x len(centers)`` matrix; column ``k`` equals ``dist(centers[k], idx)``.

        Dense data is computed in one vectorised pass that reproduces
        :meth:`dist` bitwise; other kinds fall back to one call per center.
        """
        centers = np.asarray(centers, dtype=np.intp).ravel()
        idx = np.asarray(idx, dtype=np.intp).ravel()
        out = np.empty((idx.size, centers.size), dtype=np.float64)
        if idx.size == 0 or centers.size == 0:
            return out
        if self.data.kind != DENSE:
            for k, c in enumerate(centers):
                out[:, k] = self.dist(c, idx, count=count)
            return out
        X = self._X
        C = X[centers]
        step = max(1, 2_000_000 // max(1, centers.size * max(X.shape[1], 1)))
        for s in range(0, idx.size, step):
            out[s:s + step] = _dense_dists(X[idx[s:s + step]], C, self.metric)
        if count:
            self.counter.add(full=out.size)
        return out

    def dist_pair(self, i: int, j: int, count: bool = True) -> float:
        return float(self.dist(i, [j], count=count)[0])

    def _sparse_dists(self, i, idx):
        X = self._csr
        rows = X[idx]
        start, stop = X.indptr[i], X.indptr[i + 1]
        ia, va = X.indices[start:stop], X.data[start:stop]
        n, la = idx.size, ia.size
        if la == 0:
            diff = rows.copy()
        else:
            rep = sp.csr_matrix(
                (np.tile(va, n), np.tile(ia, n), np.arange(0, n * la + 1, la)),
                shape=rows.shape,
            )
            diff = (rows - rep).tocsr()
        diff.sort_indices()
        if self.metric == "l2":
            sq = diff.multiply(diff).tocsr()
            out = np.asarray(sq.sum(axis=1)).ravel()
            return np.sqrt(out)
        absd = abs(diff).tocsr()
        if self.metric == "l1":
            return np.asarray(absd.sum(axis=1)).ravel()
        return np.asarray(absd.max(axis=1).toarray()).ravel()

    def _sequence_dists(self, i, idx, thresholds):
        seqs = self.data.samples
        a = seqs[i]
        out = np.empty(idx.size, dtype=np.float64)
        aborted = 0
        normalized = self.metric == "normalized-levenshtein"
        if thresholds is None:
            fn = normalized_levenshtein if normalized else levenshtein
            for n, j in enumerate(idx):
                out[n] = fn(a, seqs[j])
            return out, 0
        thr = np.broadcast_to(np.asarray(thresholds, dtype=np.float64), idx.shape)
        fn = normalized_levenshtein_banded if normalized else levenshtein_banded
        for n, j in enumerate(idx):
            res, _ = fn(a, seqs[j], float(thr[n]))
            if res.exact:
                out[n] = res.value
            else:
                out[n] = np.inf
                aborted += 1
        return out, aborted

    def pairwise(self, rows, cols, count: bool = True) -> np.ndarray:
        """Dense ``len(rows) x len(cols)`` distance matrix."""
        rows = np.asarray(rows, dtype=np.intp)
        cols = np.asarray(cols, dtype=np.intp)
        out = np.empty((rows.size, cols.size), dtype=np.float64)
        for r, i in enumerate(rows):
            out[r] = self.dist(i, cols, count=count)
        return out


def cross_distances(samples, centers, metric: str = "l2") -> np.ndarray:
    """Distances between every sample of one collection and every center of another.

    Used for out-of-sample prediction; not counted.
    """
    metric = canonical_metric(metric)
    if metric in SEQUENCE_METRICS:
        fn = normalized_levenshtein if metric == "normalized-levenshtein" else levenshtein
        return np.array([[float(fn(s, c)) for c in centers] for s in samples], dtype=np.float64)
    if sp.issparse(samples) or sp.issparse(centers):
        A = sp.csr_matrix(samples, dtype=np.float64)
        B = sp.csr_matrix(centers, dtype=np.float64)
        out = np.empty((A.shape[0], B.shape[0]))
        for k in range(B.shape[0]):
            rep = sp.vstack([B[k]] * A.shape[0]).tocsr()
            diff = (A - rep).tocsr()
            if metric == "l2":
                out[:, k] = np.sqrt(np.asarray(diff.multiply(diff).sum(axis=1)).ravel())
            elif metric == "l1":
                out[:, k] = np.asarray(abs(diff).sum(axis=1)).ravel()
            else:
                out[:, k] = np.asarray(abs(diff).max(axis=1).toarray()).ravel()
        return out
    A = np.asarray(samples, dtype=np.float64)
    B = np.asarray(centers, dtype=np.float64)
    diff = A[:, None, :] - B[None, :, :]
    if metric == "l2":
        return np.sqrt((diff * diff).sum(axis=2))
    if metric == "l1":
        return np.abs(diff).sum(axis=2)
    return np.abs(diff).max(axis=2)
