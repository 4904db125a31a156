"""Synthetic datasets: Gaussian blobs on a grid and four small benchmark problems."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp

from .data import Dataset

SYNTHETIC_KINDS = ("syn1", "syn2", "syn3", "syn4")


@dataclass
class GridGaussianSpec:
    """``side x side`` grid of cluster centers with isotropic Gaussian noise.

    With ``blobs_per_cell=2`` every grid cell holds two blobs at
    ``g -/+ (blob_offset, 0)``, each with ``points_per_cluster`` samples.
    """

    side: int = 20
    points_per_cluster: int = 100
    sigma: float = 0.0625
    seed: int = 0
    blobs_per_cell: int = 1
    blob_offset: float = 0.25

    def __post_init__(self):
        if self.side < 2:
            raise ValueError("grid side must be >= 2")
        if self.points_per_cluster < 1:
            raise ValueError("points_per_cluster must be >= 1")
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")
        if self.blobs_per_cell not in (1, 2):
            raise ValueError("blobs_per_cell must be 1 or 2")


@dataclass
class GridData:
    X: np.ndarray
    centers: np.ndarray
    labels: np.ndarray
    sigma: float

    @property
    def dataset(self) -> Dataset:
        return Dataset.from_any(self.X)


def grid_centers(side: int, blobs_per_cell: int = 1, blob_offset: float = 0.25) -> np.ndarray:
    g = np.array([(i, j) for i in range(side) for j in range(side)], dtype=np.float64)
    if blobs_per_cell == 1:
        return g
    shift = np.array([blob_offset, 0.0])
    return np.concatenate([np.stack([c - shift, c + shift]) for c in g])


def gen_grid_gaussian(spec: GridGaussianSpec | None = None, **kwargs) -> GridData:
    """Samples ``x = g + sigma * z`` for every blob center ``g``, grouped by blob."""
    spec = spec or GridGaussianSpec(**kwargs)
    rng = np.random.default_rng(spec.seed)
    centers = grid_centers(spec.side, spec.blobs_per_cell, spec.blob_offset)
    m = spec.points_per_cluster
    labels = np.repeat(np.arange(centers.shape[0]), m)
    X = centers[labels] + spec.sigma * rng.standard_normal((labels.size, 2))
    return GridData(X, centers, labels, spec.sigma)


@dataclass
class SyntheticSpec:
    """Parameters for :func:`gen_synthetic`; unused fields are ignored per kind.

    ``n_centers`` / ``samples_per_center`` default per kind to
    syn1: 10/50, syn2: 50/100, syn3: 144/50 (12 x 12 grid), syn4: -/2000.
    """

    kind: str = "syn1"
    seed: int = 0
    n_centers: int | None = None
    samples_per_center: int | None = None
    n_samples: int = 2000
    sequence_length: int = 16
    n_mutations: int = 2
    dimension: int = 1_000_000
    nonzeros: int = 5
    grid_side: int = 12
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in SYNTHETIC_KINDS:
            raise ValueError(f"unknown synthetic kind {self.kind!r}; choose from {SYNTHETIC_KINDS}")

    def to_dict(self):
        return asdict(self)


def _mutate(seq: list, rng) -> list:
    op = rng.integers(3)
    if op == 0 or len(seq) == 0:  # insertion
        pos = rng.integers(len(seq) + 1)
        return seq[:pos] + [str(rng.integers(2))] + seq[pos:]
    pos = rng.integers(len(seq))
    if op == 1:  # deletion
        return seq[:pos] + seq[pos + 1:]
    out = list(seq)  # replacement by the other bit
    out[pos] = "1" if seq[pos] == "0" else "0"
    return out


def gen_syn1(spec: SyntheticSpec):
    """Binary strings: random centers, each sample a center after a few random edits."""
    rng = np.random.default_rng(spec.seed)
    k, m = spec.n_centers or 10, spec.samples_per_center or 50
    centers = ["".join(map(str, rng.integers(0, 2, spec.sequence_length))) for _ in range(k)]
    samples, labels = [], []
    for c, center in enumerate(centers):
        for _ in range(m):
            s = list(center)
            for _ in range(spec.n_mutations):
                s = _mutate(s, rng)
            samples.append("".join(s))
            labels.append(c)
    return Dataset.from_any(samples, kind="sequence"), centers, np.array(labels)


def gen_syn2(spec: SyntheticSpec):
    """Sparse vectors ``c_a + Q c_b`` with ``Q ~ U[-0.5, 0.5]`` and sparse Gaussian centers."""
    rng = np.random.default_rng(spec.seed)
    k, m = spec.n_centers or 50, spec.samples_per_center or 100
    D, nnz = spec.dimension, spec.nonzeros
    idx = np.stack([np.sort(rng.choice(D, nnz, replace=False)) for _ in range(k)])
    val = rng.standard_normal((k, nnz))
    C = sp.csr_matrix((val.ravel(), idx.ravel(), np.arange(0, k * nnz + 1, nnz)), shape=(k, D))
    a = np.repeat(np.arange(k), m)
    b = (a + 1 + rng.integers(k - 1, size=a.size)) % k
    Q = rng.uniform(-0.5, 0.5, size=a.size)
    X = C[a] + sp.diags(Q) @ C[b]
    return Dataset.from_any(sp.csr_matrix(X)), C, a


def gen_syn3(spec: SyntheticSpec):
    grid = gen_grid_gaussian(GridGaussianSpec(
        side=spec.grid_side, points_per_cluster=spec.samples_per_center or 50,
        sigma=spec.sigma, seed=spec.seed))
    return Dataset.from_any(grid.X), grid.centers, grid.labels


def gen_syn4(spec: SyntheticSpec):
    """Uniform points on the unit square; pair with the l-infinity metric and step potential."""
    rng = np.random.default_rng(spec.seed)
    X = rng.random((spec.n_samples, 2))
    return Dataset.from_any(X), None, None


def gen_synthetic(spec: SyntheticSpec | None = None, **kwargs):
    """Dataset, true centers (or None) and true labels (or None) for ``spec.kind``."""
    spec = spec or SyntheticSpec(**kwargs)
    return {"syn1": gen_syn1, "syn2": gen_syn2, "syn3": gen_syn3, "syn4": gen_syn4}[spec.kind](spec)


def lattice_centers(n_per_side: int = 10) -> np.ndarray:
    """Centers of the ``n x n`` cells tiling the unit square."""
    t = (np.arange(n_per_side) + 0.5) / n_per_side
    return np.array([(x, y) for x in t for y in t])
