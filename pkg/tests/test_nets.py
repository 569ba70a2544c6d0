import math

import numpy as np
import pytest

from anisomesh.canvas import build_canvas
from anisomesh.errors import EmptyInput, NetOverflow
from anisomesh.geodesic import EdgeGraph
from anisomesh.metric_field import euclidean, hyperbolic_shock, uniform
from anisomesh.nets import generate_net, net_report

UNIT = ((0.0, 0.0), (1.0, 1.0))
H = 0.02


@pytest.fixture(scope="module")
def canvas():
    return build_canvas(UNIT, H * math.sqrt(2))


def test_huge_target_gives_seed_only(canvas):
    s = generate_net(canvas, euclidean(2), 2.0, (0.3, 0.4))
    assert np.array_equal(s, [[0.3, 0.4]])


def test_unit_square_target_04(canvas):
    f = euclidean(2)
    s = generate_net(canvas, f, 0.4, (0.5, 0.5))
    assert 4 <= len(s) <= 9
    r = net_report(canvas, f, s)
    assert r.epsilon_hat <= 0.4
    assert r.mu_hat >= 0.4 * (1 - 1e-9)
    assert 0 < r.lambda_hat <= 2
    assert r.delta_hat is None or 0 <= r.iota_hat <= 1
    # exact pairwise distances agree with the canvas ones
    d = np.linalg.norm(s[:, None] - s[None], axis=2)
    assert r.mu_hat == pytest.approx(d[np.triu_indices(len(s), 1)].min(), abs=1e-9)


def test_stretched_metric_needs_more_sites(canvas):
    a = generate_net(canvas, euclidean(2), 0.4, (0.5, 0.5))
    b = generate_net(canvas, uniform(np.diag([4.0, 1.0])), 0.4, (0.5, 0.5))
    assert len(b) > len(a)


def test_overflow(canvas):
    with pytest.raises(NetOverflow):
        generate_net(canvas, euclidean(2), 0.05, (0.5, 0.5), max_sites=5)


def test_empty(canvas):
    with pytest.raises(EmptyInput):
        net_report(canvas, euclidean(2), np.zeros((0, 2)))


def test_cocircular_square_zero_protection(canvas):
    s = [[0.2, 0.2], [0.8, 0.2], [0.2, 0.8], [0.8, 0.8], [0.5, 0.02]]
    r = net_report(canvas, euclidean(2), s[:4] + [[0.02, 0.5]])
    assert r.delta_exact == pytest.approx(0.0, abs=1e-9)
    assert r.delta_hat < 2 * H


def test_two_sites_mu(canvas):
    r = net_report(canvas, euclidean(2), [[0.1, 0.2], [0.7, 0.6]])
    assert r.mu_hat == pytest.approx(math.hypot(0.6, 0.4), rel=1e-9)
    assert r.delta_hat is None


def test_uniform_delta_matches_exact():
    c = build_canvas(UNIT, 0.005 * math.sqrt(2))
    f = euclidean(2)
    s = generate_net(c, f, 0.3, (0.37, 0.61))
    r = net_report(c, f, s)
    assert r.delta_exact is not None
    assert r.delta_hat == pytest.approx(r.delta_exact, abs=0.05)


def test_generated_net_certified(canvas):
    f = hyperbolic_shock()
    s = generate_net(canvas, f, 0.25, (0.1, 0.9))
    r = net_report(canvas, f, s)
    assert r.epsilon_hat <= 0.25
    assert r.mu_hat >= 0.25 - 1e-12
    assert 0 < r.lambda_hat <= 2


def test_monotone_coverage(canvas):
    f = hyperbolic_shock()
    s = generate_net(canvas, f, 0.2, (0.5, 0.5))
    g = EdgeGraph(canvas, f)
    state = g.new_state()
    prev = math.inf
    for i, p in enumerate(s):
        g.propagate(state, [canvas.nearest_vertex(p[None])[0]], [i])
        cur = float(state[0].max())
        assert cur < prev
        prev = cur


def test_near_cocircular_trend():
    c = build_canvas(UNIT, 0.005 * math.sqrt(2))
    f = euclidean(2)
    vals = []
    for t in (0.2, 0.1, 0.05, 0.0):
        base = np.array([[0.25, 0.25], [0.75, 0.25], [0.25, 0.75], [0.75 + t, 0.75 + t]])
        vals.append(net_report(c, f, np.vstack([base, [[0.03, 0.5]]])).delta_hat)
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.03
