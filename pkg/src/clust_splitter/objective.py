"""Function values and subgradients of the three clustering objectives.

All objectives use squared Euclidean distance.  At kinks a fixed branch is
used: the smallest center index for min-over-centers terms, and the
``r`` branch for the starting-point auxiliary term when ``d2 == r``.
Centers that own no points get a zero subgradient block.
"""

from dataclasses import dataclass

import numpy as np

from .data import chunked_sum, nearest_center
from .errors import DimensionMismatch, EmptySubset


def _centers(x, n):
    x = np.asarray(x, dtype=float)
    if n < 1 or x.ndim != 1 or x.size == 0 or x.size % n:
        raise DimensionMismatch(f"decision vector of length {x.size} does not split into n={n} blocks")
    return x.reshape(-1, n)


def _subset_points(dataset, subset):
    idx = np.asarray(subset, dtype=np.intp).reshape(-1)
    if idx.size == 0:
        raise EmptySubset("subset of points is empty")
    return dataset.points[idx]


def _min_value(points, centers):
    _, sq = nearest_center(points, centers)
    return chunked_sum(sq)


def _block_sums(labels, values, k):
    """Row sums of ``values`` grouped by label; empty groups give zeros."""
    out = np.zeros((k, values.shape[1]))
    order = np.argsort(labels, kind="stable")
    lab = labels[order]
    starts = np.flatnonzero(np.r_[True, lab[1:] != lab[:-1]])
    out[lab[starts]] = np.add.reduceat(values[order], starts, axis=0)
    return out


def _min_subgradient(points, centers):
    return _min_value_and_subgradient(points, centers)[1]


def _min_value_and_subgradient(points, centers):
    labels, sq = nearest_center(points, centers)
    # Sum (x_j - a) directly rather than count*x_j - sum(a): no cancellation.
    g = 2.0 * _block_sums(labels, centers[labels] - points, centers.shape[0])
    return chunked_sum(sq), g.reshape(-1)


def eval_k_clustering(dataset, x):
    """Sum over points of the squared distance to the nearest of the k centers."""
    return _min_value(dataset.points, _centers(x, dataset.n))


def subgrad_k_clustering(dataset, x):
    return _min_subgradient(dataset.points, _centers(x, dataset.n))


@dataclass(frozen=True)
class SpaContext:
    """Points of the cluster being split and their squared distances ``r``
    to the cluster's current center."""

    subset: np.ndarray
    r: np.ndarray
    split_center: np.ndarray

    @property
    def r_total(self):
        return chunked_sum(self.r)


def make_spa_context(dataset, subset, split_center):
    pts = _subset_points(dataset, subset)
    c = np.asarray(split_center, dtype=float).reshape(-1)
    if c.size != dataset.n:
        raise DimensionMismatch(f"split center has length {c.size}, expected {dataset.n}")
    diff = pts - c
    r = np.einsum("ij,ij->i", diff, diff)
    r.setflags(write=False)
    idx = np.array(subset, dtype=np.intp).reshape(-1)
    idx.setflags(write=False)
    return SpaContext(subset=idx, r=r, split_center=c.copy())


def _spa_terms(ctx, dataset, z):
    z = np.asarray(z, dtype=float).reshape(-1)
    if z.size != dataset.n:
        raise DimensionMismatch(f"z has length {z.size}, expected {dataset.n}")
    pts = dataset.points[ctx.subset]
    diff = pts - z
    d2 = np.einsum("ij,ij->i", diff, diff)
    closer = d2 < ctx.r
    return pts, z, d2, closer


def eval_spa(ctx, dataset, z):
    """Sum of ``min(r, d2(z, a))`` over the split cluster; never above ``sum(r)``."""
    _, _, d2, closer = _spa_terms(ctx, dataset, z)
    return chunked_sum(np.where(closer, d2, ctx.r))


def subgrad_spa(ctx, dataset, z):
    pts, z, _, closer = _spa_terms(ctx, dataset, z)
    return 2.0 * (z - pts[closer]).sum(axis=0)


def eval_two_aux(dataset, subset, y):
    pts = _subset_points(dataset, subset)
    return _min_value(pts, _two_centers(y, dataset.n))


def subgrad_two_aux(dataset, subset, y):
    pts = _subset_points(dataset, subset)
    return _min_subgradient(pts, _two_centers(y, dataset.n))


def _two_centers(y, n):
    c = _centers(y, n)
    if c.shape[0] != 2:
        raise DimensionMismatch(f"expected a vector of length {2 * n}, got {c.size}")
    return c


class KClusteringOracle:
    """``x -> (f_k(x), subgradient)`` over the whole dataset."""

    def __init__(self, dataset):
        self.points = dataset.points
        self.n = dataset.n

    def __call__(self, x):
        return _min_value_and_subgradient(self.points, _centers(x, self.n))


class TwoAuxOracle(KClusteringOracle):
    """The 2-center objective restricted to one cluster's points."""

    def __init__(self, dataset, subset):
        self.points = _subset_points(dataset, subset)
        self.n = dataset.n

    def __call__(self, y):
        return _min_value_and_subgradient(self.points, _two_centers(y, self.n))


class SpaOracle:
    """``z -> (spa(z), subgradient)`` for a fixed :class:`SpaContext`."""

    def __init__(self, ctx, dataset):
        self.ctx = ctx
        self.points = dataset.points[ctx.subset]
        self.r = ctx.r

    def __call__(self, z):
        z = np.asarray(z, dtype=float).reshape(-1)
        diff = self.points - z
        d2 = np.einsum("ij,ij->i", diff, diff)
        closer = d2 < self.r
        f = chunked_sum(np.where(closer, d2, self.r))
        return f, 2.0 * (z - self.points[closer]).sum(axis=0)
