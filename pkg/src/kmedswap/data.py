"""Immutable sample collections: dense vectors, sparse vectors or sequences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
import scipy.sparse as sp

DENSE = "dense"
SPARSE = "sparse"
SEQUENCE = "sequence"


@dataclass(frozen=True, eq=False)
class Dataset:
    """N samples of a single kind.

    ``samples`` is a 2-D float array for dense data, a CSR matrix for sparse
    data and a tuple of strings (or tuples of hashable symbols) for sequences.
    Use :meth:`from_any` rather than the constructor.
    """

    samples: Any
    kind: str

    @property
    def n_samples(self) -> int:
        if self.kind == SEQUENCE:
            return len(self.samples)
        return self.samples.shape[0]

    def __len__(self):
        return self.n_samples

    @property
    def is_vector(self) -> bool:
        return self.kind in (DENSE, SPARSE)

    def __getitem__(self, i):
        if self.kind == SEQUENCE:
            return self.samples[i]
        return self.samples[i]

    def take(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=np.intp)
        if self.kind == SEQUENCE:
            return Dataset(tuple(self.samples[i] for i in indices), SEQUENCE)
        return Dataset(self.samples[indices], self.kind)

    def equals(self, other: "Dataset") -> bool:
        if self.kind != other.kind or self.n_samples != other.n_samples:
            return False
        if self.kind == DENSE:
            return self.samples.shape == other.samples.shape and bool(
                np.array_equal(self.samples, other.samples)
            )
        if self.kind == SPARSE:
            a, b = self.samples, other.samples
            return (
                np.array_equal(a.indptr, b.indptr)
                and np.array_equal(a.indices, b.indices)
                and np.array_equal(a.data, b.data)
            )
        return tuple(self.samples) == tuple(other.samples)

    @classmethod
    def from_any(cls, X, kind: str | None = None) -> "Dataset":
        """Build a validated dataset, inferring the kind when not given."""
        if isinstance(X, Dataset):
            return X
        if kind is None:
            if sp.issparse(X):
                kind = SPARSE
            elif _looks_like_sequences(X):
                kind = SEQUENCE
            else:
                kind = DENSE
        if kind == DENSE:
            arr = np.array(X, dtype=np.float64)
            if arr.ndim == 1:
                arr = arr.reshape(-1, 1)
            if arr.ndim != 2:
                raise ValueError(f"dense data must be 2-D, got shape {arr.shape}")
            if arr.shape[0] < 1:
                raise ValueError("dataset must contain at least one sample")
            if not np.all(np.isfinite(arr)):
                raise ValueError("dense data contains NaN or infinite values")
            arr.setflags(write=False)
            return cls(arr, DENSE)
        if kind == SPARSE:
            mat = sp.csr_matrix(X, dtype=np.float64, copy=True)
            mat.sum_duplicates()
            mat.sort_indices()
            if mat.shape[0] < 1:
                raise ValueError("dataset must contain at least one sample")
            if not np.all(np.isfinite(mat.data)):
                raise ValueError("sparse data contains NaN or infinite values")
            return cls(mat, SPARSE)
        if kind == SEQUENCE:
            seqs = tuple(s if isinstance(s, str) else tuple(s) for s in X)
            if len(seqs) < 1:
                raise ValueError("dataset must contain at least one sample")
            return cls(seqs, SEQUENCE)
        raise ValueError(f"unknown dataset kind {kind!r}")


def _looks_like_sequences(X) -> bool:
    if isinstance(X, np.ndarray):
        return X.dtype.kind in "USO" and X.ndim == 1
    if isinstance(X, (list, tuple)) and len(X) > 0:
        return all(isinstance(s, str) for s in X)
    return False


def as_sequence_list(X: Sequence) -> list:
    return [s if isinstance(s, str) else tuple(s) for s in X]
