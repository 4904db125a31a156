import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from kmedswap.data import Dataset
from kmedswap.datagen import (
    GridGaussianSpec,
    SyntheticSpec,
    gen_grid_gaussian,
    gen_synthetic,
    grid_centers,
    lattice_centers,
)
from kmedswap.io import DatasetFormatError, load_dataset, write_dataset
from kmedswap.lloyd import mse_of
from kmedswap.metrics import MetricSpace
from kmedswap.potentials import Potential
from kmedswap.state import total_energy

from oracles import edit_distance

# ---------------------------------------------------------------- grid data


def test_grid_sample_count_and_labels():
    g = gen_grid_gaussian(side=3, points_per_cluster=7, sigma=0.1, seed=0)
    assert g.X.shape == (63, 2)
    assert g.centers.shape == (9, 2)
    np.testing.assert_array_equal(np.bincount(g.labels), [7] * 9)


def test_grid_tiny_sigma_lattice_is_optimal():
    g = gen_grid_gaussian(side=4, points_per_cluster=5, sigma=1e-12, seed=1)
    assert np.abs(g.X - g.centers[g.labels]).max() < 1e-10
    assert mse_of(g.X, g.centers) < 1e-20


def test_grid_cluster_means_concentrate():
    sigma, m = 0.2, 400
    g = gen_grid_gaussian(side=3, points_per_cluster=m, sigma=sigma, seed=2)
    for k, c in enumerate(g.centers):
        mean = g.X[g.labels == k].mean(axis=0)
        assert np.all(np.abs(mean - c) <= 5 * sigma / np.sqrt(m))


def test_grid_two_blobs_per_cell():
    g = gen_grid_gaussian(side=2, points_per_cluster=3, sigma=0.1, blobs_per_cell=2)
    assert g.X.shape == (24, 2)
    np.testing.assert_allclose(grid_centers(2, 2)[:2], [[-0.25, 0.0], [0.25, 0.0]])


def test_grid_deterministic_bytes():
    a = gen_grid_gaussian(side=3, points_per_cluster=4, sigma=0.3, seed=9).X
    b = gen_grid_gaussian(GridGaussianSpec(side=3, points_per_cluster=4, sigma=0.3, seed=9)).X
    assert a.tobytes() == b.tobytes()


@pytest.mark.parametrize("kw", [dict(side=1), dict(points_per_cluster=0), dict(sigma=0.0),
                                dict(blobs_per_cell=3)])
def test_grid_spec_errors(kw):
    with pytest.raises(ValueError):
        GridGaussianSpec(**kw)


# ---------------------------------------------------------------- synthetic problems


def test_syn1_samples_within_two_edits_of_source():
    data, centers, labels = gen_synthetic(kind="syn1", seed=0, n_centers=4, samples_per_center=25)
    assert data.kind == "sequence" and data.n_samples == 100
    assert all(len(c) == 16 and set(c) <= {"0", "1"} for c in centers)
    for s, k in zip(data.samples, labels):
        assert edit_distance(s, centers[k]) <= 2


def test_syn2_sparsity():
    data, C, labels = gen_synthetic(kind="syn2", seed=0, n_centers=6, samples_per_center=10)
    assert data.kind == "sparse" and data.n_samples == 60
    assert data.samples.shape[1] == 1_000_000
    assert np.diff(data.samples.indptr).max() <= 10
    assert np.diff(C.indptr).tolist() == [5] * 6


def test_syn3_is_integer_grid():
    data, centers, _ = gen_synthetic(kind="syn3", seed=0, grid_side=3, samples_per_center=2)
    assert data.n_samples == 18
    np.testing.assert_array_equal(centers, grid_centers(3))


def test_syn4_lattice_has_zero_step_energy():
    data, _, _ = gen_synthetic(kind="syn4", seed=0, n_samples=3000)
    X = np.vstack([data.samples, lattice_centers(10)])
    space = MetricSpace(X, "linf")
    centers = np.arange(3000, 3100)
    assert total_energy(centers, space, Potential("step")) == 0.0
    assert lattice_centers(10)[0].tolist() == pytest.approx([0.05, 0.05])


@pytest.mark.parametrize("kind", ["syn1", "syn2", "syn3", "syn4"])
def test_synthetic_deterministic(kind):
    spec = SyntheticSpec(kind=kind, seed=3, n_centers=5, samples_per_center=4, n_samples=50,
                         grid_side=3)
    a, b = gen_synthetic(spec)[0], gen_synthetic(spec)[0]
    if a.kind == "sparse":
        assert (a.samples != b.samples).nnz == 0
    elif a.kind == "dense":
        assert a.samples.tobytes() == b.samples.tobytes()
    else:
        assert list(a.samples) == list(b.samples)


def test_synthetic_unknown_kind():
    with pytest.raises(ValueError):
        SyntheticSpec(kind="syn5")


# ---------------------------------------------------------------- loading


def test_load_dense_csv(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("1.0,2.0\n3.0,4.0")
    d = load_dataset(p, "dense-csv")
    np.testing.assert_array_equal(d.samples, [[1.0, 2.0], [3.0, 4.0]])


def test_load_sparse_line_with_label(tmp_path):
    p = tmp_path / "x.svm"
    p.write_text("0 3:1.5 7:2.0\n")
    d = load_dataset(p, "sparse-svm")
    assert d.samples.nnz == 2
    assert d.samples[0, 3] == 1.5 and d.samples[0, 7] == 2.0


def test_load_text_lines(tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("ACGT\nAC\n")
    assert list(load_dataset(p, "lines-of-text").samples) == ["ACGT", "AC"]


@pytest.mark.parametrize("fmt", ["dense-csv", "sparse-svm", "lines-of-text"])
def test_empty_file_rejected(tmp_path, fmt):
    p = tmp_path / "empty"
    p.write_text("")
    with pytest.raises(DatasetFormatError):
        load_dataset(p, fmt)


@pytest.mark.parametrize("text, fmt, lineno", [
    ("1,2\n3\n", "dense-csv", 2),
    ("1,2\nx,4\n", "dense-csv", 2),
    ("1,2\n\n3,4\n", "dense-csv", 2),
    ("1:2\n3:a\n", "sparse-svm", 2),
    ("5:1 2:1\n", "sparse-svm", 1),
    ("1 2 3\n", "sparse-svm", 1),
])
def test_malformed_line_reports_line_number(tmp_path, text, fmt, lineno):
    p = tmp_path / "bad"
    p.write_text(text)
    with pytest.raises(DatasetFormatError) as exc:
        load_dataset(p, fmt)
    assert exc.value.lineno == lineno
    assert f"line {lineno}" in str(exc.value)


def test_unknown_format(tmp_path):
    with pytest.raises(ValueError):
        load_dataset(tmp_path / "x", "parquet")


def test_write_rejects_wrong_format(tmp_path):
    with pytest.raises(ValueError):
        write_dataset(np.zeros((2, 2)), tmp_path / "x", "lines-of-text")
    with pytest.raises(ValueError):
        write_dataset(["a\nb"], tmp_path / "x")


# ---------------------------------------------------------------- round trips

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 4), st.data())
def test_dense_round_trip(tmp_path_factory, n, d, data):
    X = np.array(data.draw(st.lists(st.lists(finite, min_size=d, max_size=d), min_size=n, max_size=n)))
    p = tmp_path_factory.mktemp("rt") / "x.csv"
    write_dataset(X, p)
    assert load_dataset(p, "dense-csv").samples.tobytes() == X.tobytes()


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_sparse_round_trip(tmp_path_factory, n, d, seed):
    rng = np.random.default_rng(seed)
    M = sp.csr_matrix(rng.normal(size=(n, d)) * (rng.random((n, d)) < 0.4))
    p = tmp_path_factory.mktemp("rt") / "x.svm"
    write_dataset(M, p)
    back = load_dataset(p, "sparse-svm", n_features=d).samples
    assert back.shape == M.shape
    assert (back != M).nnz == 0


@settings(max_examples=60, deadline=None)
@given(st.lists(st.text(alphabet=st.characters(blacklist_characters="\n\r",
                                               blacklist_categories=("Cs",)), max_size=8),
                min_size=1, max_size=6))
def test_text_round_trip(tmp_path_factory, words):
    p = tmp_path_factory.mktemp("rt") / "x.txt"
    write_dataset(Dataset.from_any(words, kind="sequence"), p)
    assert list(load_dataset(p, "lines-of-text").samples) == words
