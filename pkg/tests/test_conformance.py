import math

import numpy as np
import pytest

from anisomesh.canvas import build_canvas
from anisomesh.drvd import from_simplices
from anisomesh.errors import DegenerateSites, SiteCollision
from anisomesh.exact_oracle import circumcenters, euclidean_delaunay_bruteforce
from anisomesh.metric_field import euclidean, hyperbolic_shock, uniform
from anisomesh.conformance import (compare_complexes, restricted_delaunay, verify_encompassing,
                                   verify_euclidean_equality, verify_refinement, verify_separation,
                                   verify_uniform_equality, voronoi_face_meets_box)
from anisomesh.nets import generate_net, net_report

UNIT = ((0.0, 0.0), (1.0, 1.0))


def test_compare_examples():
    x = from_simplices([(0, 1, 2), (1, 2, 3)])
    assert compare_complexes(x, x).equal
    v = compare_complexes(from_simplices([(0, 1, 2)]), from_simplices([(0, 1), (1, 2), (0, 2)]))
    assert v.missing == [(0, 1, 2)] and v.extra == [] and not v.equal
    v = compare_complexes(from_simplices([(0, 1, 2), (3,)]), from_simplices([(0, 1, 2), (0, 3)]))
    assert v.extra == [(0, 3)] and v.missing == []


def test_three_sites_equal():
    r = verify_euclidean_equality([[0.2, 0.2], [0.8, 0.3], [0.4, 0.7]], 0.02)
    assert r.equal and not r.restricted


def test_degenerate_raises():
    with pytest.raises(DegenerateSites):
        verify_euclidean_equality([[0, 0], [1, 0], [0, 1], [1, 1]], 0.05)


@pytest.fixture(scope="module")
def net20():
    c = build_canvas(UNIT, 0.01 * math.sqrt(2))
    f = euclidean(2)
    s = generate_net(c, f, 0.19, (0.13, 0.57))
    return s, net_report(c, f, s, exact_check=False)


def test_practical_rule_and_coarse(net20):
    s, r = net20
    assert 12 <= len(s) <= 40
    fine = verify_euclidean_equality(s, r.mu_hat / 10)
    # the practical rule is a heuristic; the only tolerated miss is one
    # diagonal flip inside a near-cocircular quadruple
    if not fine.equal:
        quad = set().union(*fine.missing, *fine.extra)
        assert len(quad) == 4 and len(fine.missing) == len(fine.extra) == 2
    try:
        coarse = verify_euclidean_equality(s, 2 * r.mu_hat)
        assert not coarse.equal
    except SiteCollision:
        pass


def test_uniform_equality_small():
    p = np.array([[0.1, 0.1], [0.9, 0.2], [0.5, 0.9], [0.45, 0.4], [0.2, 0.7]])
    r = verify_uniform_equality(p, np.diag([4.0, 1.0]), 0.004)
    assert r.equal, (r.missing, r.extra)


def test_restricted_oracle():
    p = np.random.default_rng(2).random((12, 2))
    ex = euclidean_delaunay_bruteforce(p)
    full, _ = restricted_delaunay(p, [-10, -10], [10, 10])
    assert full.simplices == ex.simplices
    # a triangle's Voronoi vertex is its circumcentre: a box around it keeps it
    t = ex.top[0]
    cen = ex.circumcenters[0]
    assert voronoi_face_meets_box(p, t, cen - 1e-3, cen + 1e-3) > 0
    sub, _ = restricted_delaunay(p, [0.4, 0.4], [0.6, 0.6])
    assert sub.simplices <= ex.simplices


def test_separation_two_triangles():
    p = np.array([[0, 0], [1, 0], [0.5, 0.8], [0.5, -0.6], [3.0, 3.0]])
    ex = euclidean_delaunay_bruteforce(p)
    r = verify_separation(p)
    # brute-force min over facet-adjacent circumcentre pairs
    owner, best = {}, math.inf
    for t, s in enumerate(ex.top):
        for k in range(3):
            f = s[:k] + s[k + 1:]
            if f in owner:
                best = min(best, np.linalg.norm(ex.circumcenters[t] - ex.circumcenters[owner[f]]))
            owner[f] = t
    assert r.min_adjacent_vertex_dist == pytest.approx(best, abs=1e-12)
    c1, _ = circumcenters(np.array([p[[0, 1, 2]], p[[0, 1, 3]]], dtype=float))
    assert best <= np.linalg.norm(c1[0] - c1[1]) + 1e-12
    assert r.vertices_ok and r.faces_ok


def test_separation_near_cocircular():
    t = 1e-5
    p = np.array([[0, 0], [1, 0], [0, 1], [1 + t, 1 + t], [3.0, -2.0]])
    r = verify_separation(p)
    assert r.min_adjacent_vertex_dist < 1e-4
    assert r.vertex_bound < 1e-4
    assert r.vertices_ok


def test_separation_on_net(net20):
    s, _ = net20
    r = verify_separation(s, canvas=build_canvas(UNIT, 0.01 * math.sqrt(2)))
    assert r.vertices_ok and r.faces_ok
    assert r.adjacent_pairs > 0


def test_encompassing_identical_metrics():
    c = build_canvas(UNIT, 0.04)
    p = np.random.default_rng(0).random((8, 2))
    r = verify_encompassing(p, euclidean(2), 3, c)
    assert r.holds and r.omega0 == 0.0 and r.psi0 == 1.0
    r = verify_encompassing(p, uniform(np.diag([4.0, 1.0])), 3, c)
    assert r.holds and r.omega0 == pytest.approx(0.0, abs=1e-12)


def test_encompassing_shock_reported():
    c = build_canvas(UNIT, 0.02)
    p = np.random.default_rng(1).random((8, 2))
    r = verify_encompassing(p, hyperbolic_shock(alpha=0.3), 0, c)
    assert r.psi0 >= 1 and r.omega0 >= 0 and r.checked_vertices > 0
    with pytest.raises(IndexError):
        verify_encompassing(p, euclidean(2), 9, c)


def test_refinement_fine_is_stable():
    p = np.array([[0.2, 0.2], [0.8, 0.25], [0.5, 0.8], [0.45, 0.45]])
    r = verify_refinement(p, euclidean(2), UNIT, 0.02)
    assert r.equal and r.vertices[1] > r.vertices[0]
