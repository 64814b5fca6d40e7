"""Reference computations that share no code with the package.

Everything here is deliberately naive: explicit loops, direct pair
counting and exhaustive enumeration.
"""

import itertools
from math import comb
from fractions import Fraction

import numpy as np


def table_to_labels(table):
    """Expand a contingency table (rows = reference classes) to label vectors."""
    true, pred = [], []
    for i, row in enumerate(table):
        for j, c in enumerate(row):
            true += [i] * int(c)
            pred += [j] * int(c)
    return np.array(true), np.array(pred)


def pair_counting_ari(u, v):
    """Adjusted Rand index from the four pair counts, in exact fractions."""
    n = len(u)
    a = b = c = d = 0
    for i in range(n):
        for j in range(i + 1, n):
            same_u = u[i] == u[j]
            same_v = v[i] == v[j]
            if same_u and same_v:
                a += 1
            elif same_u:
                b += 1
            elif same_v:
                c += 1
            else:
                d += 1
    pairs = a + b + c + d
    expected = Fraction((a + b) * (a + c), pairs)
    maximum = Fraction((a + b) + (a + c), 2)
    if maximum == expected:
        return 1.0
    return float((a - expected) / (maximum - expected))


def brute_accuracy(u, v):
    """Best fraction of agreement over all injective relabelings of ``v``."""
    cu = sorted(set(u))
    cv = sorted(set(v))
    n = len(u)
    best = 0
    # pad the smaller side with dummies so every permutation is a matching
    slots = cu + [None] * max(0, len(cv) - len(cu))
    for perm in itertools.permutations(slots, len(cv)):
        mapping = dict(zip(cv, perm))
        hit = sum(1 for a, b in zip(u, v) if mapping[b] == a)
        best = max(best, hit)
    return best / n


def brute_mssc(points, k):
    """Global optimum of the k-partition sum of squares by full enumeration.

    Point 0 is pinned to block 0 to halve the search; every block must be
    nonempty.  Each partition is scored with its centroids.
    """
    pts = np.asarray(points, dtype=float)
    m = pts.shape[0]
    best = np.inf
    for tail in itertools.product(range(k), repeat=m - 1):
        lab = (0,) + tail
        if len(set(lab)) < k:
            continue
        s = 0.0
        for j in range(k):
            block = pts[[i for i in range(m) if lab[i] == j]]
            s += float(((block - block.mean(axis=0)) ** 2).sum())
        best = min(best, s)
    return best


def brute_mssc_fast(points, k):
    """Same optimum as :func:`brute_mssc`, vectorized over all labelings."""
    pts = np.asarray(points, dtype=float)
    m = pts.shape[0]
    labs = np.array(list(itertools.product(range(k), repeat=m - 1)), dtype=np.intp).reshape(-1, m - 1)
    labs = np.hstack([np.zeros((labs.shape[0], 1), dtype=np.intp), labs])
    gain = np.zeros(labs.shape[0])
    full = np.ones(labs.shape[0], dtype=bool)
    for j in range(k):
        mask = (labs == j).astype(float)
        cnt = mask.sum(axis=1)
        sums = mask @ pts
        full &= cnt > 0
        gain += np.where(cnt > 0, (sums ** 2).sum(axis=1) / np.maximum(cnt, 1), 0.0)
    return float((pts ** 2).sum() - gain[full].max())


def naive_k_clustering(points, centers):
    total = 0.0
    for a in np.asarray(points, dtype=float):
        total += min(float(((a - c) ** 2).sum()) for c in np.asarray(centers, dtype=float))
    return total


def central_difference(f, x, e, h=1e-6):
    return (f(x + h * e) - f(x - h * e)) / (2 * h)


def naive_dbi(points, labels, centers):
    k = len(centers)
    s = []
    for j in range(k):
        block = [p for p, lab in zip(points, labels) if lab == j]
        s.append(sum(float(np.sqrt(((p - centers[j]) ** 2).sum())) for p in block) / len(block))
    total = 0.0
    for i in range(k):
        total += max((s[i] + s[j]) / float(np.sqrt(((centers[i] - centers[j]) ** 2).sum()))
                     for j in range(k) if j != i)
    return total / k


def naive_dunn(points, labels, centers):
    k = len(centers)
    num = min(float(np.sqrt(((centers[i] - centers[j]) ** 2).sum()))
              for i in range(k) for j in range(k) if i != j)
    den = max(float(np.sqrt(((p - centers[lab]) ** 2).sum())) for p, lab in zip(points, labels))
    return num / den


def table_pair_ari(table):
    """ARI from the four pair counts derived from a contingency table, in fractions."""
    t = [[int(c) for c in row] for row in table]
    n = sum(map(sum, t))
    a = sum(comb(c, 2) for row in t for c in row)
    same_u = sum(comb(sum(row), 2) for row in t)
    same_v = sum(comb(sum(col), 2) for col in zip(*t))
    pairs = comb(n, 2)
    expected = Fraction(same_u * same_v, pairs)
    maximum = Fraction(same_u + same_v, 2)
    return float((a - expected) / (maximum - expected))
