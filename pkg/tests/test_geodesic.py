import math

import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from anisomesh.canvas import build_canvas
from anisomesh.errors import EmptyInput, OutOfDomain, SiteCollision
from anisomesh.geodesic import EdgeGraph, farthest_vertex, multi_front_dijkstra, site_distance_fields
from anisomesh.metric_field import euclidean, hyperbolic_shock, uniform, uniform_distance

UNIT = ((0, 0), (1, 1))
METRICS = [np.eye(2), 4 * np.eye(2), np.diag([4.0, 1.0]), np.array([[2.0, 0.5], [0.5, 1.0]])]


def scipy_graph(c, f):
    g = EdgeGraph(c, f, method="graph")
    e = c.edges
    w = g.edge_weights
    n = c.n_vertices
    return csr_matrix((np.r_[w, w], (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])), shape=(n, n))


@pytest.mark.parametrize("method", ["vector", "graph"])
def test_axis_and_diagonal_paths(unit_canvas, eucl, method):
    fr = multi_front_dijkstra(unit_canvas, eucl, [[0.0, 0.0]], method=method)
    c = unit_canvas
    assert fr.dist[c.nearest_vertex([[1.0, 0.0]])[0]] == pytest.approx(1.0)
    assert fr.dist[c.nearest_vertex([[1.0, 1.0]])[0]] == pytest.approx(math.sqrt(2))
    assert np.all(fr.color == 0)


def test_bisector_tie_break(eucl):
    c = build_canvas(UNIT, 0.05 * math.sqrt(2))
    fr = multi_front_dijkstra(c, eucl, [[0.25, 0.5], [0.75, 0.5]])
    x = c.vertices[:, 0]
    assert np.all(fr.color[x < 0.5 - 1e-9] == 0)
    assert np.all(fr.color[x > 0.5 + 1e-9] == 1)
    assert np.all(fr.color[np.abs(x - 0.5) < 1e-9] == 0)


def test_graph_mode_matches_scipy_oracle():
    c = build_canvas(UNIT, 0.1)
    for f in (euclidean(2), uniform(METRICS[3]), hyperbolic_shock(alpha=2.0)):
        src = c.nearest_vertex([[0.3, 0.6]])[0]
        ours = EdgeGraph(c, f, method="graph").distances_from(src)
        ref = dijkstra(scipy_graph(c, f), indices=src)
        assert np.allclose(ours, ref, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("m", METRICS)
def test_vector_exact_on_uniform_fields(m):
    c = build_canvas(UNIT, 0.05)
    f = uniform(m)
    fr = multi_front_dijkstra(c, f, [[0.4, 0.3]])
    exact = uniform_distance(m, c.vertices, c.vertices[fr.sources[0]])
    assert np.allclose(fr.dist, exact, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("m", METRICS)
@pytest.mark.parametrize("method", ["vector", "graph"])
def test_oracle_sandwich_lower_bound(m, method):
    # graph paths are polygonal, so they can only overestimate
    c = build_canvas(UNIT, 0.08)
    f = uniform(m)
    fr = multi_front_dijkstra(c, f, [[0.52, 0.48]], method=method)
    exact = uniform_distance(m, c.vertices, c.vertices[fr.sources[0]])
    assert np.all(fr.dist >= exact * (1 - 1e-12))


def test_graph_chord_factor_isotropic():
    # documents the plain-graph chord factor on the alternating canvas
    c = build_canvas(UNIT, 0.02 * math.sqrt(2))
    f = euclidean(2)
    g = EdgeGraph(c, f, method="graph")
    rng = np.random.default_rng(5)
    ratios = []
    for _ in range(20):
        s = rng.integers(c.n_vertices)
        d = g.distances_from(s)
        e = np.linalg.norm(c.vertices - c.vertices[s], axis=1)
        far = e > 0.3
        ratios.append((d[far] / e[far]).max())
    # 8-neighbour bound 1/cos(22.5 deg) plus the parity detour of degree-4 vertices
    assert max(ratios) <= 1.0 / math.cos(math.pi / 8) + 0.03


@pytest.mark.parametrize("m", METRICS)
def test_convergence_under_halving(m):
    f = uniform(m)
    site, target = np.array([0.2, 0.2]), np.array([0.8, 0.6])
    errs = []
    for h in (0.1, 0.05, 0.025, 0.0125):
        c = build_canvas(UNIT, h * math.sqrt(2))
        fr = multi_front_dijkstra(c, f, [site])
        v = c.nearest_vertex([target])[0]
        errs.append(abs(fr.dist[v] - uniform_distance(m, site, target)))
    assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))


def test_vector_converges_on_shock_field():
    # reference: fine canvas; coarse errors must shrink as the canvas refines
    f = hyperbolic_shock(alpha=2.0)
    site = np.array([0.3, 0.2])
    probes = np.array([[0.7, 0.8], [0.5, 0.9], [0.9, 0.4], [0.2, 0.8]])
    ref_c = build_canvas(UNIT, 0.0025 * math.sqrt(2))
    ref = EdgeGraph(ref_c, f).distances_from(ref_c.nearest_vertex([site])[0])
    ref = ref[ref_c.nearest_vertex(probes)]
    errs = {}
    for method in ("vector", "graph"):
        errs[method] = []
        for h in (0.04, 0.02, 0.01):
            c = build_canvas(UNIT, h * math.sqrt(2))
            d = EdgeGraph(c, f, method=method).distances_from(c.nearest_vertex([site])[0])
            errs[method].append(np.max(np.abs(d[c.nearest_vertex(probes)] / ref - 1)))
    assert errs["vector"][-1] < 0.02
    assert errs["vector"][-1] < errs["graph"][-1]


@pytest.mark.parametrize("method", ["vector", "graph"])
def test_front_invariants(method):
    c = build_canvas(UNIT, 0.04)
    f = hyperbolic_shock(alpha=3.0)
    rng = np.random.default_rng(2)
    sites = rng.random((7, 2))
    g = EdgeGraph(c, f, method=method)
    fr = multi_front_dijkstra(c, f, sites, graph=g)
    assert np.all(fr.dist >= 0)
    assert np.all(fr.dist[fr.sources] == 0)
    assert np.all(fr.color[fr.sources] == np.arange(7))
    assert fr.color.min() >= 0 and fr.color.max() < 7
    e = c.edges
    w = g.edge_weights
    a, b = fr.dist[e[:, 0]], fr.dist[e[:, 1]]
    assert np.all(b <= a + w + 1e-12) and np.all(a <= b + w + 1e-12)
    # every colour class is edge-connected
    for k in range(7):
        keep = (fr.color[e[:, 0]] == k) & (fr.color[e[:, 1]] == k)
        ids = np.nonzero(fr.color == k)[0]
        remap = -np.ones(c.n_vertices, dtype=int)
        remap[ids] = np.arange(len(ids))
        sub = csr_matrix((np.ones(keep.sum()), (remap[e[keep, 0]], remap[e[keep, 1]])),
                         shape=(len(ids), len(ids)))
        assert connected_components(sub, directed=False)[0] == 1


def test_deterministic():
    c = build_canvas(UNIT, 0.05)
    f = hyperbolic_shock()
    sites = np.random.default_rng(0).random((10, 2))
    a = multi_front_dijkstra(c, f, sites)
    b = multi_front_dijkstra(c, f, sites)
    assert np.array_equal(a.dist, b.dist) and np.array_equal(a.color, b.color)


def test_errors(unit_canvas, eucl):
    with pytest.raises(SiteCollision):
        multi_front_dijkstra(unit_canvas, eucl, [[0.5, 0.5], [0.51, 0.52]])
    with pytest.raises(OutOfDomain):
        multi_front_dijkstra(unit_canvas, eucl, [[1.5, 0.5]])
    with pytest.raises(EmptyInput):
        multi_front_dijkstra(unit_canvas, eucl, np.zeros((0, 2)))
    with pytest.raises(ValueError):
        EdgeGraph(unit_canvas, eucl, method="fast")


class TestFarthestVertex:
    def test_centre_site_graph_oracle(self, eucl):
        c = build_canvas(UNIT, math.sqrt(2) / 6)  # 6x6 cells
        fr = multi_front_dijkstra(c, eucl, [[0.5, 0.5]], method="graph")
        v, d = farthest_vertex(fr, c)
        ref = dijkstra(scipy_graph(c, eucl), indices=fr.sources[0])
        assert d == pytest.approx(ref.max())
        assert v == int(np.argmax(ref))
        assert tuple(c.vertices[v]) in {(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)}

    def test_centre_site_vector_exact(self, eucl):
        c = build_canvas(UNIT, math.sqrt(2) / 6)
        v, d = farthest_vertex(multi_front_dijkstra(c, eucl, [[0.5, 0.5]]))
        assert d == pytest.approx(math.sqrt(0.5))
        assert v == 0  # corner (0, 0), lowest index among ties

    def test_all_vertices_are_sites(self, unit_canvas, eucl):
        fr = multi_front_dijkstra(unit_canvas, eucl, unit_canvas.vertices)
        assert farthest_vertex(fr)[1] == 0.0

    def test_two_sites_symmetric(self, eucl):
        c = build_canvas(UNIT, 0.1 * math.sqrt(2))
        fr = multi_front_dijkstra(c, eucl, [[0.0, 0.5], [1.0, 0.5]])
        v, d = farthest_vertex(fr)
        assert c.vertices[v][0] == pytest.approx(0.5)
        assert d == pytest.approx(math.hypot(0.5, 0.5))


def test_site_distance_fields(unit_canvas, eucl):
    d = site_distance_fields(unit_canvas, eucl, [[0, 0], [1, 1]])
    assert d.shape == (2, 36)
    assert d[0, 35] == pytest.approx(math.sqrt(2)) and d[1, 0] == pytest.approx(math.sqrt(2))
