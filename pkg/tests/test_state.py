import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmedswap.metrics import MetricSpace
from kmedswap.potentials import Potential
from kmedswap.state import (
    EmptyClusterError,
    cluster_medoid,
    rebuild_state,
    top_two,
    total_energy,
)

from oracles import energy, medoid_costs, pairwise, vec_dist

QUAD = Potential("quadratic")


def line(values):
    return MetricSpace(np.asarray(values, dtype=float)[:, None], "l2")


def test_total_energy_two_points():
    assert total_energy([0], line([0, 2]), QUAD) == 2.0


def test_total_energy_every_point_a_center():
    space = line([0, 3, 7, 8])
    assert total_energy([0, 1, 2, 3], space, Potential("exponential")) == 0.0


def test_total_energy_two_groups():
    # centers at values 1 and 11
    space = line([0, 1, 2, 10, 11, 12])
    assert total_energy([1, 4], space, QUAD) == pytest.approx(2 / 3, rel=1e-15)


def test_rebuild_state_small_line():
    # centers are the values 0 and 6; d2 recomputed by brute force
    pts = [0, 1, 5, 6]
    st_ = rebuild_state([0, 3], line(pts), QUAD)
    D = pairwise([(p,) for p in pts], vec_dist)
    assert [sorted((D[i][0], D[i][3]))[1] for i in range(4)] == [6, 5, 5, 6]
    np.testing.assert_array_equal(st_.a1, [0, 0, 1, 1])
    np.testing.assert_array_equal(st_.d1, [0, 1, 1, 0])
    np.testing.assert_array_equal(st_.d2, [6, 5, 5, 6])
    np.testing.assert_array_equal(st_.a2, [1, 1, 0, 0])
    np.testing.assert_array_equal(st_.sizes, [2, 2])
    np.testing.assert_array_equal(st_.max_d1, [1, 1])
    np.testing.assert_array_equal(st_.max_d2, [6, 6])
    np.testing.assert_allclose(st_.mean_margin, [(36 + 24) / 2, (24 + 36) / 2])
    np.testing.assert_array_equal(st_.cluster_energy, [1, 1])
    assert st_.energy == 0.5


def test_rebuild_state_all_centers():
    space = line([0, 2, 3, 9])
    s = rebuild_state([0, 1, 2, 3], space, QUAD)
    np.testing.assert_array_equal(s.d1, 0)
    np.testing.assert_array_equal(s.d2, [2, 1, 1, 6])


def test_center_order_does_not_change_energy():
    space = line([0, 1, 5, 6, 9])
    assert rebuild_state([0, 3, 4], space, QUAD).energy == rebuild_state([4, 0, 3], space, QUAD).energy


def test_rebuild_state_errors():
    space = line([0, 1, 2])
    with pytest.raises(ValueError):
        rebuild_state([0], space, QUAD)
    with pytest.raises(ValueError):
        rebuild_state([1, 1], space, QUAD)
    with pytest.raises(ValueError):
        rebuild_state([0, 5], space, QUAD)


def test_inter_center_matrix():
    space = line([0, 1, 5, 6])
    s = rebuild_state([0, 2, 3], space, QUAD, with_cc=True)
    np.testing.assert_array_equal(s.cc, [[0, 5, 6], [5, 0, 1], [6, 1, 0]])
    assert rebuild_state([0, 2], space, QUAD).cc is None


def test_ties_go_to_lowest_cluster_index():
    s = rebuild_state([2, 0], line([0, 1, 2]), QUAD)
    assert s.a1[1] == 0  # equidistant from both centers
    a1, a2, d1, d2 = top_two(np.array([[1.0, 1.0, 1.0]]))
    assert (a1[0], a2[0]) == (0, 1)


def test_cluster_medoid_examples():
    space = line([0, 1, 5, 7, 9])
    assert cluster_medoid([0, 1, 2], space, QUAD) == 1  # costs 26, 17, 41
    assert cluster_medoid([3], space, QUAD) == 3
    assert cluster_medoid([4, 3], space, QUAD) == 3
    with pytest.raises(EmptyClusterError):
        cluster_medoid([], space, QUAD)


def test_copy_and_same_as():
    s = rebuild_state([0, 2], line([0, 1, 5, 6]), QUAD, with_cc=True)
    c = s.copy()
    assert c.same_as(s)
    c.d1[0] = 9
    assert not c.same_as(s)


points = st.lists(st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=3, max_size=14)


@settings(max_examples=120, deadline=None)
@given(points, st.data(), st.sampled_from(["l2", "l1", "linf"]),
       st.sampled_from(["quadratic", "identity", "logarithmic"]))
def test_state_invariants_against_brute_force(pts, data, metric, kind):
    X = np.array(pts, dtype=float)
    n = len(pts)
    K = data.draw(st.integers(2, n))
    centers = data.draw(st.permutations(range(n)))[:K]
    space = MetricSpace(X, metric)
    psi = Potential(kind)
    s = rebuild_state(centers, space, psi, with_cc=True)
    D = pairwise([tuple(p) for p in pts], lambda a, b: vec_dist(a, b, metric))
    for i in range(n):
        ds = sorted(D[i][c] for c in centers)
        assert s.d1[i] == pytest.approx(ds[0], abs=1e-12)
        assert s.d2[i] == pytest.approx(ds[1], abs=1e-12)
        assert s.a1[i] != s.a2[i]
        assert s.d1[i] <= s.d2[i]
    assert s.sizes.sum() == n
    for k, c in enumerate(centers):
        assert s.d1[c] == 0
        assert s.a1[c] == k or s.d1[c] == 0
    assert s.energy == pytest.approx(energy(D, centers, kind), rel=1e-9, abs=1e-12)
    assert total_energy(centers, space, psi) == pytest.approx(s.energy, rel=1e-9, abs=1e-12)
    assert np.array_equal(s.cc, s.cc.T)
    assert np.all(np.diag(s.cc) == 0)
    for k in range(K):
        mem = s.members[k]
        if mem.size:
            assert s.max_d1[k] == s.d1[mem].max()
            assert s.max_d2[k] == s.d2[mem].max()
            assert s.mean_margin[k] == pytest.approx(s.margins[mem].mean())
            assert s.cluster_energy[k] == pytest.approx(math.fsum(s.e1[mem]))


@settings(max_examples=100, deadline=None)
@given(points, st.data())
def test_cluster_medoid_matches_exhaustive_costs(pts, data):
    X = np.array(pts, dtype=float)
    n = len(pts)
    members = sorted(data.draw(st.sets(st.integers(0, n - 1), min_size=1)))
    D = pairwise([tuple(p) for p in pts], vec_dist)
    costs = medoid_costs(D, members)
    best = min(costs.values())
    got = cluster_medoid(members, MetricSpace(X), QUAD)
    assert got in members
    assert costs[got] <= best * (1 + 1e-12) + 1e-12
