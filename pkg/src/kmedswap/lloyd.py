"""Plain Lloyd refinement of K-means centers on dense data."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import DENSE, Dataset


@dataclass
class LloydResult:
    centers: np.ndarray
    labels: np.ndarray
    mse: float
    n_iter: int
    mse_trace: list = field(default_factory=list)
    converged: bool = True


def _dense(X) -> np.ndarray:
    if isinstance(X, Dataset):
        if X.kind != DENSE:
            raise ValueError("lloyd requires dense vector data")
        return X.samples
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("lloyd requires a 2-D array")
    return X


def squared_distances(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    """Exact ``N x K`` squared Euclidean distances, computed in row chunks."""
    N, d = X.shape
    K = C.shape[0]
    out = np.empty((N, K))
    step = max(1, int(4_000_000 // max(1, K * d)))
    for s in range(0, N, step):
        diff = X[s:s + step, None, :] - C[None, :, :]
        out[s:s + step] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def assign(X: np.ndarray, C: np.ndarray):
    """Nearest center (lowest index on ties) and squared distance per sample."""
    D = squared_distances(X, C)
    labels = np.argmin(D, axis=1)
    return labels, D[np.arange(X.shape[0]), labels]


def mse_of(X, centers) -> float:
    """Mean squared distance from each sample to its nearest center."""
    X = _dense(X)
    _, sq = assign(X, np.asarray(centers, dtype=np.float64))
    return math.fsum(sq) / X.shape[0]


def _means(X, labels, K):
    sums = np.zeros((K, X.shape[1]))
    np.add.at(sums, labels, X)
    counts = np.bincount(labels, minlength=K)
    return sums, counts


def run_lloyd(X, init, max_iter: int = 10_000) -> LloydResult:
    """Alternate nearest-center assignment and mean update until assignments repeat.

    Parameters
    ----------
    X : array-like of shape (n_samples, n_features) or dense Dataset
    init : array of shape (K, n_features) or 1-D array of K sample indices
    max_iter : int, default=10000

    Empty clusters are re-seeded at the sample farthest from its nearest
    center, which keeps ``K`` constant and cannot increase the MSE.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    X = _dense(X)
    init = np.asarray(init)
    if init.ndim == 1:
        C = X[init.astype(np.intp)].astype(np.float64, copy=True)
    else:
        C = np.array(init, dtype=np.float64)
        if C.ndim != 2 or C.shape[1] != X.shape[1]:
            raise ValueError("initial centers must have shape (K, n_features)")
    K = C.shape[0]
    if K < 1:
        raise ValueError("need at least one center")
    N = X.shape[0]

    labels, sq = assign(X, C)
    trace = [math.fsum(sq) / N]
    n_iter = 0
    converged = False
    while n_iter < max_iter:
        n_iter += 1
        sums, counts = _means(X, labels, K)
        filled = counts > 0
        C[filled] = sums[filled] / counts[filled, None]
        empty = np.flatnonzero(~filled)
        if empty.size:
            order = np.argsort(-sq, kind="stable")
            C[empty] = X[order[: empty.size]]
        new_labels, sq = assign(X, C)
        trace.append(math.fsum(sq) / N)
        if np.array_equal(new_labels, labels):
            converged = True
            break
        labels = new_labels
    return LloydResult(C, labels, trace[-1], n_iter, trace, converged)
