"""
Farthest-point nets and measured (epsilon, mu, delta) certificates.
"""
from dataclasses import asdict, dataclass, field
import math

import numpy as np

from .drvd import color_canvas, extract_complex
from .errors import EmptyInput, NetOverflow
from .exact_oracle import power_protection, uniform_delaunay
from .geodesic import EdgeGraph, snap_sites

MAX_SITES = 10_000


@dataclass
class NetReport:
    epsilon_hat: float
    mu_hat: float
    delta_hat: float = None
    iota_hat: float = None
    lambda_hat: float = None
    delta_exact: float = None  # closed-form cross-check for uniform fields
    boundary_flags: list = field(default_factory=list)
    n_sites: int = 0
    canvas_vertices: int = 0
    canvas_step: list = None

    def to_dict(self):
        return asdict(self)


def generate_net(c, f, epsilon_target, seed_point, graph=None, max_sites=MAX_SITES):
    """Geodesic farthest-point insertion until every vertex is within epsilon_target."""
    if graph is None:
        graph = EdgeGraph(c, f)
    seed = np.asarray(seed_point, dtype=float)
    sites = [seed]
    state = graph.new_state()
    dist = state[0]
    src = snap_sites(c, seed[None, :])
    graph.propagate(state, src, [0])
    while True:
        v = int(np.argmax(dist))
        if dist[v] <= epsilon_target:
            break
        if len(sites) >= max_sites:
            raise NetOverflow(f"more than {max_sites} sites needed for epsilon {epsilon_target}")
        sites.append(c.vertices[v].copy())
        graph.propagate(state, [v], [len(sites) - 1])
    return np.array(sites)


def _candidate_vertices(c, cells, rings):
    verts = np.unique(c.cells[cells])
    indptr, indices, _ = c.csr
    for _ in range(rings):
        nb = [indices[indptr[v]:indptr[v + 1]] for v in verts]
        verts = np.unique(np.concatenate([verts] + nb))
    return verts


def net_report(c, f, sites, graph=None, rings=2, exact_check=True):
    """Measure epsilon (farthest vertex), mu (closest site pair) and delta
    (protection estimated at discrete Voronoi vertices) on the canvas."""
    p = np.atleast_2d(np.asarray(sites, dtype=float))
    if p.shape[0] == 0 or p.size == 0:
        raise EmptyInput("no sites given")
    if graph is None:
        graph = EdgeGraph(c, f)
    n = len(p)
    dim = c.dim
    d = color_canvas(c, f, p, graph=graph)
    eps = float(d.front.dist.max())
    cx = extract_complex(d)
    src = d.front.sources

    tops = cx.of_dim(dim) if n >= dim + 1 else []
    colors = d.cell_colors
    cand = []
    for s in tops:
        mask = np.ones(len(colors), dtype=bool)
        for x in s:
            mask &= np.any(colors == x, axis=1)
        cand.append(_candidate_vertices(c, np.nonzero(mask)[0], rings))
    worst = [np.zeros(len(v)) for v in cand]
    foreign = [np.full(len(v), np.inf) for v in cand]

    mu = math.inf
    for i in range(n):
        di = graph.distances_from(src[i])
        if n > 1:
            others = np.delete(src, i)
            mu = min(mu, float(di[others].min()))
        for k, s in enumerate(tops):
            if i in s:
                np.maximum(worst[k], di[cand[k]], out=worst[k])
            else:
                np.minimum(foreign[k], di[cand[k]], out=foreign[k])

    delta = None
    if tops and n > dim + 1:
        best = math.inf
        for w, q in zip(worst, foreign):
            j = int(np.argmin(w))
            best = min(best, q[j] ** 2 - w[j] ** 2)
        delta = math.sqrt(max(best, 0.0))

    delta_exact = None
    if exact_check and f.is_uniform and dim + 2 <= n <= 100:
        m = f.uniform_matrix()
        ex = uniform_delaunay(p, m, dim)
        delta_exact = power_protection(p, ex, m)

    touching = np.zeros(n, dtype=bool)
    for s in range(n):
        touching[s] = bool(np.any(c.boundary_cell_mask[d.cells[s]]))
    mu = mu if n > 1 else None
    return NetReport(
        epsilon_hat=eps,
        mu_hat=mu,
        delta_hat=delta,
        iota_hat=None if delta is None else delta / eps,
        lambda_hat=None if mu is None else mu / eps,
        delta_exact=delta_exact,
        boundary_flags=np.nonzero(touching)[0].tolist(),
        n_sites=n,
        canvas_vertices=c.n_vertices,
        canvas_step=c.step.tolist(),
    )
