"""Evaluation metrics: relative errors, Davies-Bouldin and Dunn indices,
adjusted Rand index and matched accuracy against reference labels."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .data import CenterSet, assign
from .errors import (CoincidentCenters, DimensionMismatch, EmptyCluster, LengthMismatch,
                     MissingLevel, NonpositiveBest, TooFewClusters)

K_LEVELS = (2, 3, 4, 5, 10, 15, 20, 25)
MAX_MATCH_CLUSTERS = 64


def relative_error(f_k, f_best):
    """Percent deviation of ``f_k`` from ``f_best``; negative when ``f_k`` is better."""
    if not f_best > 0:
        raise NonpositiveBest(f"f_best must be positive, got {f_best}")
    return 100.0 * (f_k - f_best) / f_best


def average_relative_error(errors, levels=K_LEVELS):
    """Mean of the relative errors over the fixed set of levels."""
    missing = [k for k in levels if k not in errors]
    if missing:
        raise MissingLevel(missing)
    return sum(float(errors[k]) for k in levels) / len(levels)


# ---------------------------------------------------------------------------
# internal indices

@dataclass
class ValidityReport:
    k: int
    dbi: float
    di: float
    radii: np.ndarray
    # "ok", or "zero_radius" when every point sits on its center (di is then inf)
    di_status: str = "ok"


def _cluster_geometry(dataset, assignment, centers):
    if isinstance(centers, CenterSet):
        centers = centers.coords
    centers = np.asarray(centers, dtype=float)
    if centers.ndim != 2 or centers.shape[1] != dataset.n:
        raise DimensionMismatch(f"centers must have n={dataset.n} columns")
    k = centers.shape[0]
    if k < 2:
        raise TooFewClusters("validity indices need at least two clusters")
    labels = np.asarray(assignment.labels if hasattr(assignment, "labels") else assignment)
    if labels.shape[0] != dataset.m:
        raise LengthMismatch(f"{labels.shape[0]} labels for {dataset.m} points")
    sizes = np.bincount(labels, minlength=k)
    if sizes.shape[0] > k or np.any(sizes == 0):
        raise EmptyCluster(f"clusters {np.flatnonzero(sizes == 0).tolist()} have no points")
    dist = np.sqrt(np.einsum("ij,ij->i", dataset.points - centers[labels],
                             dataset.points - centers[labels]))
    diff = centers[:, None, :] - centers[None, :, :]
    cdist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return labels, sizes, dist, cdist


def davies_bouldin(dataset, assignment, centers):
    """Mean over clusters of the worst (S_i + S_j) / d(x_i, x_j) ratio.

    S is the mean (unsquared) distance of a cluster's points to its center.
    """
    labels, sizes, dist, cdist = _cluster_geometry(dataset, assignment, centers)
    k = sizes.shape[0]
    radii = np.bincount(labels, weights=dist, minlength=k) / sizes
    off = ~np.eye(k, dtype=bool)
    if np.any(cdist[off] == 0.0):
        raise CoincidentCenters("two distinct clusters share a center")
    ratio = np.where(off, (radii[:, None] + radii[None, :]) / np.where(off, cdist, 1.0), -np.inf)
    return float(ratio.max(axis=1).mean())


def dunn(dataset, assignment, centers):
    """Smallest center distance over the largest cluster radius.

    Returns ``math.inf`` when every point coincides with its center.
    """
    _, sizes, dist, cdist = _cluster_geometry(dataset, assignment, centers)
    k = sizes.shape[0]
    num = cdist[~np.eye(k, dtype=bool)].min()
    den = dist.max()
    if den == 0.0:
        return math.inf
    return float(num / den)


def validity_report(dataset, centers):
    """DBI, DI and mean radii for the nearest-center partition of ``centers``."""
    if not isinstance(centers, CenterSet):
        centers = CenterSet(centers)
    asg = assign(dataset, centers)
    labels, sizes, dist, _ = _cluster_geometry(dataset, asg, centers)
    radii = np.bincount(labels, weights=dist, minlength=sizes.shape[0]) / sizes
    di = dunn(dataset, asg, centers)
    return ValidityReport(k=centers.k, dbi=davies_bouldin(dataset, asg, centers), di=di,
                          radii=radii, di_status="zero_radius" if math.isinf(di) else "ok")


# ---------------------------------------------------------------------------
# external indices

@dataclass(frozen=True)
class ContingencyTable:
    """Counts n_ij of points with reference class i and predicted cluster j."""

    counts: np.ndarray

    def __post_init__(self):
        c = np.array(self.counts, dtype=np.int64, copy=True)
        if c.ndim != 2 or np.any(c < 0):
            raise ValueError("contingency counts must be a nonnegative 2-D table")
        c.setflags(write=False)
        object.__setattr__(self, "counts", c)

    @classmethod
    def from_labels(cls, true_labels, pred_labels):
        t = np.asarray(true_labels).reshape(-1)
        p = np.asarray(pred_labels).reshape(-1)
        if t.shape[0] != p.shape[0]:
            raise LengthMismatch(f"{t.shape[0]} reference labels vs {p.shape[0]} predicted")
        _, ti = np.unique(t, return_inverse=True)
        _, pi = np.unique(p, return_inverse=True)
        counts = np.zeros((ti.max(initial=-1) + 1, pi.max(initial=-1) + 1), dtype=np.int64)
        np.add.at(counts, (ti, pi), 1)
        return cls(counts)

    @property
    def row_sums(self):
        return self.counts.sum(axis=1)

    @property
    def col_sums(self):
        return self.counts.sum(axis=0)

    @property
    def total(self):
        return int(self.counts.sum())


def _pairs(values):
    return sum(math.comb(int(v), 2) for v in np.asarray(values).reshape(-1))


def ari_from_table(table):
    """Adjusted Rand index with all pair counts in exact integers."""
    n = table.total
    if n < 2:
        raise LengthMismatch("the adjusted Rand index needs at least two points")
    index = _pairs(table.counts)
    sa = _pairs(table.row_sums)
    sb = _pairs(table.col_sums)
    total = math.comb(n, 2)
    num = 2 * (index * total - sa * sb)
    den = (sa + sb) * total - 2 * sa * sb
    if den == 0:
        # both partitions trivial (all singletons or one block): they agree
        return 1.0
    return num / den


def adjusted_rand(true_labels, pred_labels):
    return ari_from_table(ContingencyTable.from_labels(true_labels, pred_labels))


def accuracy_from_table(table, matching=None):
    """Fraction of points on the matched diagonal of ``table``.

    Without ``matching`` the one-to-one class/cluster pairing maximizing the
    diagonal is used. ``matching`` maps column (cluster) index to row
    (class) index and scores that fixed pairing instead.
    """
    counts = table.counts
    n = table.total
    if n == 0:
        raise LengthMismatch("empty contingency table")
    if matching is not None:
        hit = sum(int(counts[i, j]) for j, i in dict(matching).items())
        return hit / n
    if counts.shape[1] > MAX_MATCH_CLUSTERS:
        raise ValueError(f"at most {MAX_MATCH_CLUSTERS} predicted clusters are supported")
    rows, cols = linear_sum_assignment(counts, maximize=True)
    return int(counts[rows, cols].sum()) / n


def accuracy(true_labels, pred_labels, matching=None):
    return accuracy_from_table(ContingencyTable.from_labels(true_labels, pred_labels), matching)
