"""Synthetic 2-D data: three normal clusters, one of them with outliers."""

from dataclasses import dataclass

import numpy as np

from .data import DataSet
from .errors import InvalidFraction

OUTLIER_FRACTIONS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)


@dataclass(frozen=True)
class GenConfig:
    means: tuple = ((0.0, 0.0), (6.0, -1.0), (6.0, 2.0))
    sigmas: tuple = (1.5, 0.5, 0.5)
    outlier_sigma: float = 2.0
    points_per_cluster: int = 120
    outlier_fraction: float = 0.0
    n_datasets: int = 10
    seed: int = 0

    def __post_init__(self):
        if not any(abs(self.outlier_fraction - f) < 1e-12 for f in OUTLIER_FRACTIONS):
            raise InvalidFraction(f"outlier fraction {self.outlier_fraction} not in {OUTLIER_FRACTIONS}")
        if len(self.means) != 3 or len(self.sigmas) != 3:
            raise ValueError("exactly three clusters are generated")
        if self.points_per_cluster < 1 or self.n_datasets < 1:
            raise ValueError("points_per_cluster and n_datasets must be positive")

    @property
    def n_outliers(self):
        return int(np.floor(self.outlier_fraction * self.points_per_cluster + 1e-9))


def box_muller(rng, size):
    """``size`` standard normals from pairs of uniforms (both outputs used)."""
    pairs = (size + 1) // 2
    u1 = rng.random(pairs)
    u2 = rng.random(pairs)
    # 1 - u1 lies in (0, 1], so the log is finite
    rad = np.sqrt(-2.0 * np.log1p(-u1))
    ang = 2.0 * np.pi * u2
    return np.concatenate([rad * np.cos(ang), rad * np.sin(ang)])[:size]


def generate(cfg, dataset_index):
    """One dataset of 3 * points_per_cluster points and its labels (0, 1, 2).

    Cluster C's outlier draws come first within its block.  The stream is
    seeded from ``(cfg.seed, dataset_index)``.
    """
    if not isinstance(cfg, GenConfig):
        raise TypeError("cfg must be a GenConfig")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, dataset_index])))
    m = cfg.points_per_cluster
    blocks, labels = [], []
    for c, (mu, sigma) in enumerate(zip(cfg.means, cfg.sigmas)):
        sd = np.full(m, float(sigma))
        if c == 2:
            sd[:cfg.n_outliers] = cfg.outlier_sigma
        z = box_muller(rng, 2 * m).reshape(m, 2)
        blocks.append(np.asarray(mu, dtype=float) + z * sd[:, None])
        labels.append(np.full(m, c, dtype=np.intp))
    return DataSet(np.vstack(blocks)), np.concatenate(labels)
