"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

import numbers

import numpy as np
import scipy.sparse as sp
from sklearn.utils import check_array

from .data import Dataset, _looks_like_sequences
from .metrics import SEQUENCE_METRICS, canonical_metric


def check_data(X, metric: str) -> Dataset:
    """Validated :class:`Dataset` for ``metric``.

    Dense and sparse input goes through :func:`sklearn.utils.check_array`;
    lists of strings are accepted for the Levenshtein metrics.
    """
    metric = canonical_metric(metric)
    if isinstance(X, Dataset):
        return X
    if metric in SEQUENCE_METRICS:
        if not _looks_like_sequences(X) and not (isinstance(X, (list, tuple)) and len(X) > 0):
            raise ValueError(f"metric {metric!r} expects a non-empty list of sequences")
        return Dataset.from_any(list(X), kind="sequence")
    if sp.issparse(X):
        return Dataset.from_any(check_array(X, accept_sparse="csr", dtype=np.float64))
    return Dataset.from_any(check_array(X, dtype=np.float64))


def check_n_clusters(n_clusters, n_samples: int, strict: bool = True) -> int:
    """``n_clusters`` must be an integer >= 2 and below (or at most) ``n_samples``."""
    if not isinstance(n_clusters, numbers.Integral) or isinstance(n_clusters, bool):
        raise TypeError(f"n_clusters must be an integer, got {n_clusters!r}")
    if n_clusters < 2:
        raise ValueError(f"n_clusters must be >= 2, got {n_clusters}")
    limit_ok = n_clusters < n_samples if strict else n_clusters <= n_samples
    if not limit_ok:
        raise ValueError(f"n_clusters={n_clusters} is too large for {n_samples} samples")
    return int(n_clusters)


def check_seed(random_state):
    """Integer seed (or None) from an int, None or a numpy Generator."""
    if random_state is None or isinstance(random_state, numbers.Integral):
        return random_state
    if isinstance(random_state, np.random.Generator):
        return int(random_state.integers(2**63))
    raise TypeError(f"random_state must be None, an int or a numpy Generator, got {random_state!r}")
