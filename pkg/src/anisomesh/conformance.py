"""
Verification runs tying the discrete complex to exact oracles and to the
separation and stability bounds.

Equality runs build the canvas over a box that holds every site and every
exact circumcentre, so the full Delaunay complex is the reference. When a
smaller box is forced, the reference becomes the restricted complex: the
simplices whose Voronoi face meets the box, decided by a small LP per
simplex.
"""
from dataclasses import asdict, dataclass
import math

import numpy as np
from scipy.optimize import linprog

from .canvas import build_canvas, MAX_VERTICES
from .drvd import AbstractComplex, closure, color_canvas, extract_complex
from .errors import DegenerateSites, EmptyInput
from .exact_oracle import power_protection, stretch_sites, uniform_delaunay
from .geodesic import EdgeGraph
from .metric_field import _distortion_many, euclidean, uniform
from .nets import net_report

GEOM_TOL = 1e-9


@dataclass
class EqualityVerdict:
    equal: bool
    missing: list
    extra: list

    def to_dict(self):
        return {"equal": self.equal, "missing": [list(s) for s in self.missing],
                "extra": [list(s) for s in self.extra]}


def _simplices(x):
    return x.simplices if isinstance(x, AbstractComplex) else closure(x)


def _difference_maximal(diff):
    # maximal elements of a set that is not itself downward closed
    out = []
    for s in diff:
        if not any(len(t) > len(s) and set(s) <= set(t) for t in diff):
            out.append(s)
    return sorted(out)


def compare_complexes(exact, discrete):
    """``missing``: maximal simplices of exact minus discrete; ``extra``: the reverse."""
    a, b = _simplices(exact), _simplices(discrete)
    missing = _difference_maximal(a - b)
    extra = _difference_maximal(b - a)
    return EqualityVerdict(not missing and not extra, missing, extra)


def voronoi_face_meets_box(sites, simplex, lo, hi, m=None):
    """Slack of the best point of the Voronoi face of ``simplex`` inside the
    box, in squared-distance units; positive means the face meets the box."""
    p = np.asarray(sites, dtype=float)
    dim = p.shape[1]
    g = np.eye(dim) if m is None else np.asarray(m, dtype=float)
    s = list(simplex)
    i0 = s[0]
    # d(x, q)^2 - d(x, p0)^2 = -2 (q - p0)^T G x + q^T G q - p0^T G p0
    def row(q):
        return -2.0 * (p[q] - p[i0]) @ g, p[q] @ g @ p[q] - p[i0] @ g @ p[i0]

    a_eq, b_eq = [], []
    for q in s[1:]:
        a, c = row(q)
        a_eq.append(np.append(a, 0.0))
        b_eq.append(-c)
    a_ub, b_ub = [], []
    for q in range(len(p)):
        if q in s:
            continue
        a, c = row(q)
        # a.x + c >= t  ->  -a.x + t <= c
        a_ub.append(np.append(-a, 1.0))
        b_ub.append(c)
    obj = np.zeros(dim + 1)
    obj[-1] = -1.0
    bounds = [(lo[k], hi[k]) for k in range(dim)] + [(None, 1.0)]
    res = linprog(obj, A_ub=np.array(a_ub) if a_ub else None, b_ub=np.array(b_ub) if b_ub else None,
                  A_eq=np.array(a_eq) if a_eq else None, b_eq=np.array(b_eq) if b_eq else None,
                  bounds=bounds, method="highs")
    if res.status != 0:
        return -math.inf
    return float(-res.fun)


def restricted_delaunay(sites, lo, hi, m=None, dim=2, tol=1e-12):
    """Delaunay simplices whose Voronoi face meets the closed box ``[lo, hi]``."""
    mm = np.eye(dim) if m is None else m
    ex = uniform_delaunay(sites, mm, dim)
    keep = [s for s in ex.simplices if voronoi_face_meets_box(sites, s, lo, hi, mm) > -tol]
    return AbstractComplex(closure(keep)), ex


@dataclass
class EqualityReport:
    equal: bool
    missing: list
    extra: list
    canvas_edge: float
    canvas_vertices: int
    domain: list
    restricted: bool

    def to_dict(self):
        d = asdict(self)
        d["missing"] = [list(s) for s in self.missing]
        d["extra"] = [list(s) for s in self.extra]
        return d


def equality_domain(sites, centers, margin):
    pts = np.vstack([np.asarray(sites, dtype=float), centers]) if len(centers) else np.asarray(sites)
    return pts.min(axis=0) - margin, pts.max(axis=0) + margin


def verify_equality(sites, canvas_edge, m=None, domain=None, margin=None,
                    max_vertices=MAX_VERTICES, method="vector"):
    """Discrete complex under the constant metric ``m`` (identity when None)
    against the brute-force oracle."""
    p = np.atleast_2d(np.asarray(sites, dtype=float))
    if p.size == 0:
        raise EmptyInput("no sites given")
    dim = p.shape[1]
    mm = np.eye(dim) if m is None else np.asarray(m, dtype=float)
    ex = uniform_delaunay(p, mm, dim)
    if ex.degenerate:
        raise DegenerateSites("sites are cocircular within tolerance; the exact complex is ambiguous")
    if margin is None:
        margin = max(4 * canvas_edge, 0.05 * float(np.ptp(p, axis=0).max()))
    if domain is None:
        lo, hi = equality_domain(p, ex.circumcenters, margin)
        oracle = ex.as_complex()
        restricted = False
    else:
        lo, hi = (np.asarray(b, dtype=float) for b in domain)
        inside = np.all((ex.circumcenters >= lo) & (ex.circumcenters <= hi), axis=1)
        restricted = not bool(np.all(inside))
        oracle = restricted_delaunay(p, lo, hi, mm, dim)[0] if restricted else ex.as_complex()
    c = build_canvas((lo, hi), canvas_edge, dim, max_vertices=max_vertices)
    f = euclidean(dim) if m is None else uniform(mm)
    d = color_canvas(c, f, p, graph=EdgeGraph(c, f, method=method))
    v = compare_complexes(oracle, extract_complex(d))
    return EqualityReport(v.equal, v.missing, v.extra, float(canvas_edge), c.n_vertices,
                          [lo.tolist(), hi.tolist()], restricted)


def verify_euclidean_equality(sites, canvas_edge, **kw):
    return verify_equality(sites, canvas_edge, None, **kw)


def verify_uniform_equality(sites, m, canvas_edge, **kw):
    return verify_equality(sites, canvas_edge, m, **kw)


@dataclass
class SeparationReport:
    min_adjacent_vertex_dist: float
    vertex_bound: float
    min_foreign_face_dist: float
    face_bound: float
    epsilon: float
    delta: float
    adjacent_pairs: int

    @property
    def vertices_ok(self):
        return self.min_adjacent_vertex_dist >= self.vertex_bound - GEOM_TOL

    @property
    def faces_ok(self):
        return self.min_foreign_face_dist is None or self.min_foreign_face_dist >= self.face_bound - GEOM_TOL

    def to_dict(self):
        d = asdict(self)
        d.update(vertices_ok=self.vertices_ok, faces_ok=self.faces_ok)
        return d


def _point_segment(x, a, b):
    ab = b - a
    t = np.clip((x - a) @ ab / (ab @ ab), 0.0, 1.0)
    return float(np.linalg.norm(x - (a + t * ab)))


def _point_ray(x, a, u):
    t = max(0.0, float((x - a) @ u))
    return float(np.linalg.norm(x - (a + t * u)))


def voronoi_edges_2d(q, top, centers):
    """Voronoi edge of every Delaunay edge: ``edge -> ("seg", a, b)`` or ``("ray", a, u)``."""
    owners = {}
    for t, s in enumerate(top):
        for e in ((s[0], s[1]), (s[0], s[2]), (s[1], s[2])):
            owners.setdefault(e, []).append(t)
    out = {}
    for e, ts in owners.items():
        if len(ts) == 2:
            out[e] = ("seg", centers[ts[0]], centers[ts[1]])
        else:
            s = top[ts[0]]
            k = [x for x in s if x not in e][0]
            d = q[e[1]] - q[e[0]]
            u = np.array([-d[1], d[0]]) / np.linalg.norm(d)
            if u @ (q[k] - q[e[0]]) > 0:
                u = -u
            out[e] = ("ray", centers[ts[0]], u)
    return out


def verify_separation(sites, m=None, epsilon=None, delta=None, canvas=None):
    """Exact Voronoi-vertex separation against ``delta^2 / 4 eps`` and
    Voronoi-vertex to foreign-face distances against ``delta^2 / 8 eps``.

    ``delta`` defaults to the exact protection. ``epsilon`` defaults to the
    canvas-measured radius, raised to the largest circumradius when the
    canvas misses a circumcentre's neighbourhood.
    """
    p = np.atleast_2d(np.asarray(sites, dtype=float))
    dim = p.shape[1]
    if len(p) < dim + 2:
        raise EmptyInput(f"need at least {dim + 2} sites")
    mm = np.eye(dim) if m is None else np.asarray(m, dtype=float)
    ex = uniform_delaunay(p, mm, dim)
    if ex.degenerate:
        raise DegenerateSites("sites are cocircular within tolerance")
    if delta is None:
        delta = power_protection(p, ex, mm)
    if epsilon is None:
        epsilon = float(ex.circumradii.max())
        if canvas is not None:
            f = euclidean(dim) if m is None else uniform(mm)
            epsilon = max(epsilon, net_report(canvas, f, p, exact_check=False).epsilon_hat)
    q = stretch_sites(p, mm)
    cen = stretch_sites(ex.circumcenters, mm)
    top = ex.top
    owner = {}
    best_v, pairs = math.inf, 0
    for t, s in enumerate(top):
        for drop in range(len(s)):
            facet = s[:drop] + s[drop + 1:]
            if facet in owner:
                best_v = min(best_v, float(np.linalg.norm(cen[t] - cen[owner[facet]])))
                pairs += 1
            else:
                owner[facet] = t
    best_f = None
    if dim == 2:
        best_f = math.inf
        edges = voronoi_edges_2d(q, top, cen)
        for t, s in enumerate(top):
            for e, (kind, a, b) in edges.items():
                if e[0] in s and e[1] in s:
                    continue  # incident to this Voronoi vertex
                dd = _point_segment(cen[t], a, b) if kind == "seg" else _point_ray(cen[t], a, b)
                best_f = min(best_f, dd)
    return SeparationReport(best_v, delta ** 2 / (4 * epsilon), best_f, delta ** 2 / (8 * epsilon),
                            float(epsilon), float(delta), pairs)


@dataclass
class EncompassingReport:
    holds: bool
    omega0: float
    rho: float
    psi0: float
    checked_vertices: int
    violations_outer: int
    violations_inner: int
    sample_count: int

    def to_dict(self):
        return asdict(self)


def verify_encompassing(sites, f, p_index, canvas, graph=None):
    """Compare the colouring under ``f`` with exact distances under the
    uniform reference ``g0 = f(p0)`` around site ``p0``.

    Sites are taken at their snapped canvas vertices. Checked vertices:
    those coloured ``p0`` plus those whose ``g0``-nearest site is ``p0``.
    ``rho`` and ``psi0`` are measured over that set and give
    ``omega0 = 2 rho^2 (psi0^2 - 1)``.
    """
    p = np.atleast_2d(np.asarray(sites, dtype=float))
    if not 0 <= p_index < len(p):
        raise IndexError(f"site index {p_index} out of range")
    d = color_canvas(canvas, f, p, graph=graph)
    x = canvas.vertices
    # the colouring is of the snapped sites, so compare against those
    ps = x[d.front.sources]
    g0 = f(ps[p_index])
    q = stretch_sites(ps, g0)
    y = stretch_sites(x, g0)
    d2 = np.stack([np.sum((y - qi) ** 2, axis=1) for qi in q])  # (n_sites, n_vertices)
    others = np.delete(d2, p_index, axis=0).min(axis=0) if len(p) > 1 else np.full(len(x), np.inf)
    own = d2[p_index]
    colored = d.front.color == p_index
    nearest0 = own <= others
    check = colored | nearest0
    rho = float(np.sqrt(np.max(np.maximum(own[check], np.minimum(own[check], others[check])))))
    psi0 = float(distortion_many(f, x[check], g0))
    omega0 = 2 * rho ** 2 * (psi0 ** 2 - 1)
    tol = 1e-12 * max(float(own[check].max()), 1.0)
    outer = colored & ~(own <= others + omega0 + tol)
    inner = check & (own < others - omega0 - tol) & ~colored
    return EncompassingReport(not outer.any() and not inner.any(), omega0, rho, psi0,
                              int(check.sum()), int(outer.sum()), int(inner.sum()), int(check.sum()))


def distortion_many(f, points, ref):
    if len(points) == 0:
        return 1.0
    return float(np.max(_distortion_many(f.eval_many(points), ref)))


@dataclass
class RefinementReport:
    equal: bool
    missing: list
    extra: list
    h: float
    h_half: float
    vertices: tuple

    def to_dict(self):
        d = asdict(self)
        d["missing"] = [list(s) for s in self.missing]
        d["extra"] = [list(s) for s in self.extra]
        return d


def verify_refinement(sites, f, bbox, canvas_edge, max_vertices=MAX_VERTICES):
    """Complexes at ``canvas_edge`` and ``canvas_edge / 2`` on the same box."""
    p = np.atleast_2d(np.asarray(sites, dtype=float))
    dim = p.shape[1]
    out = []
    for h in (canvas_edge, canvas_edge / 2):
        c = build_canvas(bbox, h, dim, max_vertices=max_vertices)
        out.append((c, extract_complex(color_canvas(c, f, p))))
    v = compare_complexes(out[0][1], out[1][1])
    return RefinementReport(v.equal, v.missing, v.extra, float(canvas_edge), float(canvas_edge) / 2,
                            (out[0][0].n_vertices, out[1][0].n_vertices))
