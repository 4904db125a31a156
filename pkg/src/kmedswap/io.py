"""Reading and writing datasets: dense CSV, sparse ``index:value`` lines, text lines."""

from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp

from .data import DENSE, SEQUENCE, SPARSE, Dataset

FORMATS = ("dense-csv", "sparse-svm", "lines-of-text")
_KIND_OF = {"dense-csv": DENSE, "sparse-svm": SPARSE, "lines-of-text": SEQUENCE}


class DatasetFormatError(ValueError):
    """A file could not be parsed; ``lineno`` is 1-based when known."""

    def __init__(self, message, lineno=None, path=None):
        where = f"{path or '<input>'}"
        if lineno is not None:
            where += f", line {lineno}"
        super().__init__(f"{where}: {message}")
        self.lineno = lineno
        self.path = path


def _read_lines(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise DatasetFormatError("empty file", path=path)
    return lines


def _parse_dense(lines, path):
    rows = []
    dim = None
    for n, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            raise DatasetFormatError("blank line", n, path)
        try:
            row = [float(v) for v in line.split(",")]
        except ValueError as exc:
            raise DatasetFormatError(f"not a number ({exc})", n, path) from None
        if dim is None:
            dim = len(row)
        elif len(row) != dim:
            raise DatasetFormatError(f"expected {dim} values, found {len(row)}", n, path)
        rows.append(row)
    try:
        return Dataset.from_any(np.array(rows, dtype=np.float64), kind=DENSE)
    except ValueError as exc:
        raise DatasetFormatError(str(exc), path=path) from None


def _parse_sparse(lines, path, n_features=None):
    indptr, indices, data = [0], [], []
    for n, line in enumerate(lines, 1):
        tokens = line.split()
        if tokens and ":" not in tokens[0]:
            tokens = tokens[1:]  # leading label
        last = -1
        for tok in tokens:
            key, sep, val = tok.partition(":")
            try:
                j, v = int(key), float(val)
            except ValueError:
                raise DatasetFormatError(f"bad index:value pair {tok!r}", n, path) from None
            if not sep or j < 0:
                raise DatasetFormatError(f"bad index:value pair {tok!r}", n, path)
            if j <= last:
                raise DatasetFormatError("indices must be strictly increasing", n, path)
            last = j
            indices.append(j)
            data.append(v)
        indptr.append(len(indices))
    width = (max(indices) + 1) if indices else 1
    if n_features is not None:
        if width > n_features:
            raise DatasetFormatError(f"index {width - 1} exceeds n_features={n_features}", path=path)
        width = n_features
    mat = sp.csr_matrix((np.array(data, dtype=np.float64), np.array(indices, dtype=np.int64),
                         np.array(indptr)), shape=(len(lines), width))
    return Dataset.from_any(mat, kind=SPARSE)


def load_dataset(path, format: str = "dense-csv", n_features=None) -> Dataset:
    """Parse ``path`` in one of :data:`FORMATS`.

    Parameters
    ----------
    path : str or path-like
    format : {'dense-csv', 'sparse-svm', 'lines-of-text'}
    n_features : int, optional
        Width of sparse data; inferred from the largest index when omitted.

    Raises
    ------
    DatasetFormatError
        On an empty file or a malformed line (the message names the line).
    """
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; choose from {FORMATS}")
    lines = _read_lines(path)
    if format == "dense-csv":
        return _parse_dense(lines, path)
    if format == "sparse-svm":
        return _parse_sparse(lines, path, n_features)
    return Dataset.from_any([line.rstrip("\r") for line in lines], kind=SEQUENCE)


def write_dataset(data, path, format: str | None = None) -> None:
    """Write ``data`` so that :func:`load_dataset` reproduces it exactly."""
    data = Dataset.from_any(data)
    if format is None:
        format = {v: k for k, v in _KIND_OF.items()}[data.kind]
    if _KIND_OF.get(format) != data.kind:
        raise ValueError(f"format {format!r} cannot hold {data.kind} data")
    lines = []
    if data.kind == DENSE:
        for row in data.samples:
            lines.append(",".join(repr(float(v)) for v in row))
    elif data.kind == SPARSE:
        X = data.samples
        for i in range(X.shape[0]):
            lo, hi = X.indptr[i], X.indptr[i + 1]
            lines.append(" ".join(f"{j}:{float(v)!r}" for j, v in zip(X.indices[lo:hi], X.data[lo:hi])))
    else:
        for s in data.samples:
            if not isinstance(s, str) or "\n" in s or "\r" in s:
                raise ValueError("only strings without line breaks can be written as text lines")
            lines.append(s)
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)
