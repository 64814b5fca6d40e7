import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clust_splitter.data import DataSet
from clust_splitter.errors import DimensionMismatch, EmptySubset
from clust_splitter.objective import (KClusteringOracle, SpaOracle, TwoAuxOracle, eval_k_clustering,
                                      eval_spa, eval_two_aux, make_spa_context,
                                      subgrad_k_clustering, subgrad_spa, subgrad_two_aux)
from oracles import central_difference, naive_k_clustering


def test_k_clustering_examples(four_points):
    assert eval_k_clustering(four_points, [0.5, 4.5]) == 1.0
    ds = DataSet(np.array([[0.0], [2.0]]))
    assert eval_k_clustering(ds, [1.0]) == 2.0
    assert eval_k_clustering(four_points, four_points.points.ravel()) == 0.0


def test_k_clustering_subgradients():
    ds = DataSet(np.array([[0.0], [2.0]]))
    assert subgrad_k_clustering(ds, [1.0]).tolist() == [0.0]
    assert subgrad_k_clustering(ds, [0.0]).tolist() == [-4.0]
    # second center owns nothing
    assert subgrad_k_clustering(ds, [1.0, 100.0]).tolist() == [0.0, 0.0]


def test_k_clustering_dimension_check(four_points):
    ds = DataSet(np.zeros((3, 2)))
    with pytest.raises(DimensionMismatch):
        eval_k_clustering(ds, [1.0, 2.0, 3.0])


def test_spa_context():
    ds = DataSet(np.array([[0.0], [2.0], [7.0]]))
    assert make_spa_context(ds, [0, 1], [1.0]).r.tolist() == [1.0, 1.0]
    assert make_spa_context(ds, [0, 1], [2.0]).r.tolist() == [4.0, 0.0]
    assert make_spa_context(ds, [2], [0.0]).r.shape == (1,)
    with pytest.raises(EmptySubset):
        make_spa_context(ds, [], [0.0])


def test_spa_examples():
    ds = DataSet(np.array([[0.0], [2.0]]))
    ctx = make_spa_context(ds, [0, 1], [1.0])
    assert eval_spa(ctx, ds, [0.0]) == 1.0
    assert eval_spa(ctx, ds, [1.0]) == ctx.r_total
    assert eval_spa(ctx, ds, [50.0]) == ctx.r_total
    assert subgrad_spa(ctx, ds, [0.1]) == pytest.approx([0.2], abs=1e-15)
    assert subgrad_spa(ctx, ds, [50.0]).tolist() == [0.0]
    # z on a point: that point's term contributes 2(z - a) = 0
    assert subgrad_spa(ctx, ds, [0.0]).tolist() == [0.0]
    # ties (d2 == r) take the r branch
    assert subgrad_spa(ctx, ds, [1.0]).tolist() == [0.0]


def test_two_aux_examples(four_points):
    assert eval_two_aux(four_points, [0, 1, 2, 3], [0.5, 4.5]) == 1.0
    assert eval_two_aux(four_points, [0, 1, 2, 3], [2.0, 2.0]) == eval_k_clustering(four_points, [2.0])
    assert eval_two_aux(four_points, [0, 3], [0.0, 5.0]) == 0.0
    g = subgrad_two_aux(four_points, [0, 1, 2, 3], [1.0, 1.0])
    assert g[1] == 0.0 and g[0] == 2 * (4 * 1.0 - 10.0)
    assert subgrad_two_aux(four_points, [0, 1, 2, 3], [0.5, 4.5]).tolist() == [0.0, 0.0]
    assert subgrad_two_aux(four_points, [0, 3], [0.0, 5.0]).tolist() == [0.0, 0.0]
    with pytest.raises(EmptySubset):
        eval_two_aux(four_points, [], [0.0, 1.0])


def test_oracles_match_functions(four_points):
    x = np.array([0.3, 3.9])
    f, g = KClusteringOracle(four_points)(x)
    assert f == eval_k_clustering(four_points, x)
    assert np.array_equal(g, subgrad_k_clustering(four_points, x))
    f, g = TwoAuxOracle(four_points, [1, 2, 3])(x)
    assert f == eval_two_aux(four_points, [1, 2, 3], x)
    assert np.array_equal(g, subgrad_two_aux(four_points, [1, 2, 3], x))
    ctx = make_spa_context(four_points, [0, 1, 2, 3], [2.5])
    f, g = SpaOracle(ctx, four_points)([0.7])
    assert f == eval_spa(ctx, four_points, [0.7])
    assert np.array_equal(g, subgrad_spa(ctx, four_points, [0.7]))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_objective_invariants(seed):
    rng = np.random.default_rng(seed)
    m, n, k = rng.integers(2, 30), rng.integers(1, 4), rng.integers(1, 5)
    pts = rng.standard_normal((m, n)) * 3
    ds = DataSet(pts)
    x = rng.standard_normal(k * n) * 3
    f = eval_k_clustering(ds, x)
    assert f == pytest.approx(naive_k_clustering(pts, x.reshape(k, n)), rel=1e-12, abs=1e-12)
    perm = rng.permutation(m)
    assert eval_k_clustering(DataSet(pts[perm]), x) == pytest.approx(f, rel=1e-12, abs=1e-12)
    sub = np.sort(rng.choice(m, size=rng.integers(1, m + 1), replace=False))
    y = rng.standard_normal(2 * n)
    assert eval_two_aux(ds, sub, y) == eval_k_clustering(DataSet(pts[sub]), y)
    ctx = make_spa_context(ds, sub, pts[sub].mean(axis=0))
    z = rng.standard_normal(n) * 3
    assert eval_spa(ctx, ds, z) <= ctx.r_total
    assert eval_spa(ctx, ds, ctx.split_center) == ctx.r_total


def _fd_agrees(f, g, x, rng, h=1e-6):
    fx = f(x)
    for _ in range(10):
        e = rng.standard_normal(x.size)
        e /= np.linalg.norm(e)
        if abs(g @ e - central_difference(f, x, e, h)) > 1e-4 * max(1.0, abs(fx)):
            return False
    return True


def test_finite_difference_sanity():
    rng = np.random.default_rng(5)
    ds = DataSet(rng.standard_normal((40, 2)))
    x = rng.standard_normal(6)
    f = lambda v: eval_k_clustering(ds, v)  # noqa: E731
    assert _fd_agrees(f, subgrad_k_clustering(ds, x), x, rng)
