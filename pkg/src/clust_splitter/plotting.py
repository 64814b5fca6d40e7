"""Figures for a clustering run, written to files (no display needed)."""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .data import assign  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_objective(levels, path):
    """f_k against k on a log scale."""
    ks = [lv["k"] for lv in levels]
    fs = [lv["f_k"] for lv in levels]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(ks, fs, "o-", color="tab:blue")
    if min(fs) > 0:
        ax.set_yscale("log")
    ax.set_xlabel("k")
    ax.set_ylabel("f_k")
    ax.set_xticks(ks)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_timing(levels, path):
    ks = [lv["k"] for lv in levels]
    ts = [lv["t_k"] for lv in levels]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.step(ks, ts, where="mid", color="tab:green")
    ax.plot(ks, ts, "o", color="tab:green")
    ax.set_xlabel("k")
    ax.set_ylabel("cumulative time (s)")
    ax.set_xticks(ks)
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_partition(dataset, centers, path, max_points=20000):
    """Points colored by nearest center, using the first two features."""
    asg = assign(dataset, centers)
    pts = dataset.points
    if pts.shape[0] > max_points:
        keep = np.linspace(0, pts.shape[0] - 1, max_points).astype(np.intp)
        pts, labels = pts[keep], asg.labels[keep]
    else:
        labels = asg.labels
    xy = pts[:, :2] if pts.shape[1] > 1 else np.column_stack([pts[:, 0], np.zeros(len(pts))])
    c = centers.coords
    cxy = c[:, :2] if c.shape[1] > 1 else np.column_stack([c[:, 0], np.zeros(len(c))])
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(xy[:, 0], xy[:, 1], c=labels, s=6, cmap="tab20", alpha=0.7, linewidths=0)
    ax.scatter(cxy[:, 0], cxy[:, 1], marker="x", s=60, c="k")
    ax.set_xlabel("feature 1")
    ax.set_ylabel("feature 2" if pts.shape[1] > 1 else "")
    ax.set_title(f"k = {centers.k}")
    return _save(fig, path)


def write_run_figures(outdir, dataset, report_levels, final_centers):
    """Write the standard set of figures; returns the written paths."""
    os.makedirs(outdir, exist_ok=True)
    paths = [plot_objective(report_levels, os.path.join(outdir, "objective.png")),
             plot_timing(report_levels, os.path.join(outdir, "timing.png")),
             plot_partition(dataset, final_centers, os.path.join(outdir, "partition.png"))]
    return paths
