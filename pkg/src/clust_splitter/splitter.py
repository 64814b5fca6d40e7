"""Incremental clustering by repeated cluster splitting.

Level 1 is the (convex) one-center problem.  Every further level picks the
cluster with the largest SSE, splits it with the help of the
starting-point auxiliary problem and the 2-center auxiliary problem, and
then refines all ``k`` centers on the full k-clustering objective.
"""

import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .data import CenterSet, assign, cluster_sse, nearest_center
from .errors import EmptySubset, NoSplittableCluster
from .lmbm import SolverConfig, minimize
from .objective import (KClusteringOracle, SpaOracle, TwoAuxOracle, eval_k_clustering,
                        make_spa_context)

log = logging.getLogger(__name__)

START_KINDS = ("sample", "distant_sample", "center")


@dataclass(frozen=True)
class SplitConfig:
    k_max: int
    p: int = 3
    M1: int = 10
    M2: int = 7
    min_split_size: int = 5
    distance_factor: float = 0.1
    max_distance_retries: int = 20
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)
    # Each solve stops at rel_tol * f(start) (solver.stop_tol when f(start) == 0).
    rel_tol: float = 1e-9

    def __post_init__(self):
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if self.M1 < 2 or self.M2 < 2:
            raise ValueError("M1 and M2 must be > 1")
        if self.max_distance_retries < 0 or self.distance_factor < 0:
            raise ValueError("distance settings must be nonnegative")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")


@dataclass
class Level:
    k: int
    centers: CenterSet
    f: float
    elapsed_seconds: float
    split_cluster_index: int = None
    degenerate_split: bool = False
    solver_status: str = None


@dataclass
class RunReport:
    levels: list
    status: str = "ok"
    warnings: list = field(default_factory=list)

    @property
    def f_values(self):
        return [lv.f for lv in self.levels]

    def level(self, k):
        for lv in self.levels:
            if lv.k == k:
                return lv
        raise KeyError(k)


@dataclass
class SplitResult:
    y1: np.ndarray
    y2: np.ndarray
    f_hat: float
    spa_value: float
    degenerate: bool


def _solver_cfg(cfg, f0):
    tol = cfg.rel_tol * f0 if f0 > 0 else cfg.solver.stop_tol
    return replace(cfg.solver, stop_tol=tol)


def _solve(oracle, x0, cfg):
    f0, _ = oracle(np.asarray(x0, dtype=float))
    return minimize(oracle, x0, _solver_cfg(cfg, f0))


def _sample_mean(points, size, rng):
    if points.shape[0] <= size:
        return points.mean(axis=0)
    idx = rng.choice(points.shape[0], size=size, replace=False)
    return points[np.sort(idx)].mean(axis=0)


def solve_first_center(dataset, cfg, rng):
    """Center of the one-cluster problem, started from the mean of M1 random points."""
    x0 = _sample_mean(dataset.points, cfg.M1, rng)
    res = _solve(KClusteringOracle(dataset), x0, cfg)
    return res.x_final, res


def select_split_cluster(sse_per_cluster, sizes, cfg):
    """Index of the largest-SSE cluster among those with at least min_split_size points."""
    sse = np.asarray(sse_per_cluster, dtype=float)
    sizes = np.asarray(sizes)
    ok = sizes >= max(2, cfg.min_split_size)
    if not ok.any():
        raise NoSplittableCluster(f"no cluster has at least {cfg.min_split_size} points")
    masked = np.where(ok, sse, -np.inf)
    return int(np.argmax(masked))


def generate_spa_starts(dataset, subset, split_center, cfg, rng):
    """``cfg.p`` starting points, cycling through the three start kinds."""
    idx = np.asarray(subset, dtype=np.intp).reshape(-1)
    if idx.size == 0:
        raise EmptySubset("cannot generate starts for an empty cluster")
    pts = dataset.points[idx]
    center = np.asarray(split_center, dtype=float)
    diff = pts - center
    radius = float(np.sqrt(np.einsum("ij,ij->i", diff, diff).mean()))
    threshold = cfg.distance_factor * radius
    starts = []
    for i in range(cfg.p):
        kind = START_KINDS[i % 3]
        if kind == "sample":
            starts.append(_sample_mean(pts, cfg.M1, rng))
        elif kind == "distant_sample":
            # a sample covering the whole cluster would just reproduce its center
            size = min(cfg.M2, max(1, pts.shape[0] // 2))
            z = _sample_mean(pts, size, rng)
            for _ in range(cfg.max_distance_retries):
                if np.linalg.norm(z - center) > threshold:
                    break
                z = _sample_mean(pts, size, rng)
            starts.append(z)
        else:
            starts.append(center.copy())
    return starts


def split_cluster(dataset, subset, split_center, cfg, rng):
    """Split one cluster into two centers (y1, y2)."""
    idx = np.asarray(subset, dtype=np.intp).reshape(-1)
    if idx.size == 0:
        raise EmptySubset("cannot split an empty cluster")
    center = np.asarray(split_center, dtype=float)
    ctx = make_spa_context(dataset, idx, center)
    spa = SpaOracle(ctx, dataset)
    best_z, best_f = None, np.inf
    for z0 in generate_spa_starts(dataset, idx, center, cfg, rng):
        res = _solve(spa, z0, cfg)
        if res.f_final < best_f:
            best_z, best_f = res.x_final, res.f_final

    n = dataset.n
    two = TwoAuxOracle(dataset, idx)
    res = _solve(two, np.concatenate([center, best_z]), cfg)
    y = res.x_final.reshape(2, n)
    labels, _ = nearest_center(two.points, y)
    degenerate = bool(np.bincount(labels, minlength=2).min() == 0)
    return SplitResult(y1=y[0].copy(), y2=y[1].copy(), f_hat=res.f_final,
                       spa_value=best_f, degenerate=degenerate)


def run(dataset, cfg):
    """Solve the k-clustering problems for k = 1..k_max incrementally."""
    if cfg.k_max > dataset.m:
        raise ValueError(f"k_max={cfg.k_max} exceeds the number of points m={dataset.m}")
    t0 = time.perf_counter()
    rngs = [np.random.Generator(np.random.PCG64(s))
            for s in np.random.SeedSequence(cfg.seed).spawn(cfg.k_max)]
    oracle = KClusteringOracle(dataset)

    x1, res = solve_first_center(dataset, cfg, rngs[0])
    centers = CenterSet(x1.reshape(1, -1))
    report = RunReport(levels=[Level(1, centers, eval_k_clustering(dataset, centers.flat),
                                     time.perf_counter() - t0, solver_status=res.status.value)])

    for k in range(2, cfg.k_max + 1):
        prev = report.levels[-1].centers
        asg = assign(dataset, prev)
        sse = cluster_sse(dataset, asg, prev)
        try:
            c = select_split_cluster(sse, asg.cluster_sizes, cfg)
        except NoSplittableCluster as exc:
            report.status = "no_splittable_cluster"
            report.warnings.append(f"stopped before k={k}: {exc}")
            log.warning("stopping early before k=%d: %s", k, exc)
            break
        split = split_cluster(dataset, asg.members(c), prev.coords[c], cfg, rngs[k - 1])
        if split.degenerate:
            report.warnings.append(f"degenerate split at k={k}")
        if k == 2:
            x = np.vstack([split.y1, split.y2])
            status = None
        else:
            x0 = prev.coords.copy()
            x0[c] = split.y1
            x0 = np.vstack([x0, split.y2])
            res = _solve(oracle, x0.reshape(-1), cfg)
            x = res.x_final.reshape(k, dataset.n)
            status = res.status.value
        centers = CenterSet(x)
        report.levels.append(Level(k, centers, eval_k_clustering(dataset, centers.flat),
                                   time.perf_counter() - t0, split_cluster_index=c,
                                   degenerate_split=split.degenerate, solver_status=status))
    return report
