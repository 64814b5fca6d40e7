"""Datasets, center sets, nearest-center assignment and per-cluster SSE."""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyFile, ParseError, RaggedRows

# Fixed reduction granularity; results never depend on the worker count.
CHUNK_ROWS = 8192
# Upper bound on the temporary (rows, k, n) difference block.
_BLOCK_ELEMS = 1 << 21


def worker_count():
    """Worker cap from ``CLUST_THREADS`` (0 or unset means auto)."""
    try:
        n = int(os.environ.get("CLUST_THREADS", "0"))
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return max(1, n)


def _map_chunks(func, m, chunk_rows):
    bounds = [(lo, min(lo + chunk_rows, m)) for lo in range(0, m, chunk_rows)]
    workers = min(worker_count(), len(bounds))
    if workers <= 1:
        return [func(lo, hi) for lo, hi in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: func(*b), bounds))


def chunked_sum(values):
    """Sum a 1-D array chunk by chunk, adding partials in chunk order."""
    values = np.asarray(values, dtype=float)
    if values.size <= CHUNK_ROWS:
        return float(values.sum())
    partials = _map_chunks(lambda lo, hi: values[lo:hi].sum(), values.shape[0], CHUNK_ROWS)
    total = 0.0
    for p in partials:
        total += float(p)
    return total


@dataclass(frozen=True)
class DataSet:
    """Immutable ``m x n`` collection of finite points."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise EmptyFile("dataset must contain at least one point and one feature")
        if not np.all(np.isfinite(pts)):
            raise ParseError("dataset contains non-finite values")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def m(self):
        return self.points.shape[0]

    @property
    def n(self):
        return self.points.shape[1]

    def subset(self, indices):
        return self.points[np.asarray(indices, dtype=np.intp)]


@dataclass(frozen=True)
class CenterSet:
    """Ordered ``k`` centers; ``flat`` is the solver's decision vector."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float, copy=True)
        if c.ndim == 1:
            c = c.reshape(1, -1)
        if c.ndim != 2 or c.shape[0] < 1:
            raise DimensionMismatch("a center set needs at least one center")
        if not np.all(np.isfinite(c)):
            raise ValueError("center coordinates must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @classmethod
    def from_flat(cls, x, n):
        x = np.asarray(x, dtype=float)
        if n < 1 or x.size == 0 or x.size % n:
            raise DimensionMismatch(f"vector of length {x.size} is not a multiple of n={n}")
        return cls(x.reshape(-1, n))

    @property
    def k(self):
        return self.coords.shape[0]

    @property
    def n(self):
        return self.coords.shape[1]

    @property
    def flat(self):
        return self.coords.reshape(-1)


@dataclass(frozen=True)
class Assignment:
    labels: np.ndarray
    sq_dists: np.ndarray
    cluster_sizes: np.ndarray

    @property
    def k(self):
        return self.cluster_sizes.shape[0]

    def members(self, j):
        return np.flatnonzero(self.labels == j)


def nearest_center(points, centers):
    """Labels and squared distances of ``points`` to their nearest center.

    Ties go to the smallest center index. Distances are summed feature by
    feature as ``sum((x - a)**2)``.
    """
    points = np.asarray(points, dtype=float)
    centers = np.asarray(centers, dtype=float)
    m = points.shape[0]
    k, n = centers.shape
    labels = np.empty(m, dtype=np.intp)
    sq = np.empty(m, dtype=float)
    rows = max(1, min(CHUNK_ROWS, _BLOCK_ELEMS // max(1, k * n)))

    def work(lo, hi):
        diff = points[lo:hi, None, :] - centers[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        lab = np.argmin(d2, axis=1)
        labels[lo:hi] = lab
        sq[lo:hi] = d2[np.arange(hi - lo), lab]

    _map_chunks(work, m, rows)
    return labels, sq


def _check_dims(dataset, centers):
    if centers.n != dataset.n:
        raise DimensionMismatch(f"centers have n={centers.n}, dataset has n={dataset.n}")


def assign(dataset, centers):
    """Assign every point to its nearest center (smallest index on ties)."""
    _check_dims(dataset, centers)
    labels, sq = nearest_center(dataset.points, centers.coords)
    sizes = np.bincount(labels, minlength=centers.k)
    return Assignment(labels=labels, sq_dists=sq, cluster_sizes=sizes)


def cluster_sse(dataset, assignment, centers):
    """Sum of squared distances of each cluster's points to its own center."""
    _check_dims(dataset, centers)
    if assignment.labels.shape[0] != dataset.m or assignment.k != centers.k:
        raise DimensionMismatch("assignment does not match dataset/centers")
    return np.bincount(assignment.labels, weights=assignment.sq_dists, minlength=centers.k)


def load_csv(path, delimiter=",", has_header=False):
    """Read a numeric CSV file into a :class:`DataSet`.

    Every row must have the same number of columns and every cell must
    parse as a finite float. Blank lines are ignored.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    rows = []
    width = None
    skip_header = has_header
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if skip_header:
            skip_header = False
            continue
        cells = line.split(delimiter)
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise RaggedRows(f"row {lineno} has {len(cells)} columns, expected {width}")
        row = []
        for col, cell in enumerate(cells, start=1):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"cannot parse {cell.strip()!r} at row {lineno}, column {col}",
                                 row=lineno, col=col) from None
            if not np.isfinite(v):
                raise ParseError(f"non-finite value at row {lineno}, column {col}", row=lineno, col=col)
            row.append(v)
        rows.append(row)
    if not rows:
        raise EmptyFile(f"{path} contains no data rows")
    return DataSet(np.array(rows, dtype=float))


def load_tsplib(path):
    """Read the ``NODE_COORD_SECTION`` of a TSPLIB file (e.g. ``d15112.tsp``)."""
    coords = []
    in_section = False
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            if s.startswith("NODE_COORD_SECTION"):
                in_section = True
                continue
            if not in_section:
                continue
            if s == "EOF" or not s[0].isdigit() and not s[0] in "+-.":
                break
            parts = s.split()
            try:
                coords.append([float(p) for p in parts[1:]])
            except ValueError:
                raise ParseError(f"bad coordinate line {lineno}: {s!r}", row=lineno) from None
    if not coords:
        raise EmptyFile(f"{path} has no NODE_COORD_SECTION entries")
    if len({len(c) for c in coords}) != 1:
        raise RaggedRows(f"{path}: inconsistent coordinate dimension")
    return DataSet(np.array(coords, dtype=float))


def load_labels(path):
    """One integer label per non-blank line."""
    with open(path, encoding="utf-8") as fh:
        out = []
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            try:
                out.append(int(float(s)))
            except ValueError:
                raise ParseError(f"bad label {s!r} on line {lineno}", row=lineno, col=1) from None
    return np.array(out, dtype=np.intp)


def write_csv(path, array, delimiter=","):
    array = np.atleast_2d(np.asarray(array, dtype=float))
    with open(path, "w", encoding="utf-8") as fh:
        for row in array:
            fh.write(delimiter.join(repr(float(v)) for v in row) + "\n")
