"""
Straight and curved (discrete Karcher) realisations of abstract complexes,
plus a direct embedding check.

The curved point for barycentric weights ``l`` is the canvas vertex that
minimises ``0.5 * sum_p l_p * dist_p(v)^2``, with ``dist_p`` the canvas
distance field of site ``p``.
"""
from dataclasses import dataclass, field
from collections import deque
from itertools import combinations, product

import numpy as np

from .bounds import straightening_bound
from .errors import DimensionError, InvalidBarycentric
from .geodesic import EdgeGraph, snap_sites

BARY_TOL = 1e-12


@dataclass
class RealizedComplex:
    complex: object
    site_coords: np.ndarray
    mode: str  # "straight" or "curved"
    curved_samples: dict = field(default_factory=dict)  # top simplex -> [(bary, point)]


@dataclass
class EmbeddingReport:
    inverted_count: int
    overlap_pairs: list
    degenerate: list = field(default_factory=list)

    @property
    def embedded(self):
        return self.inverted_count == 0 and not self.overlap_pairs

    def to_dict(self):
        return {"inverted_count": self.inverted_count,
                "overlap_pairs": [list(map(list, p)) for p in self.overlap_pairs],
                "degenerate": [list(s) for s in self.degenerate],
                "embedded": self.embedded}


def _check_bary(bary, k):
    b = np.asarray(bary, dtype=float)
    if b.shape != (k,):
        raise InvalidBarycentric(f"expected {k} barycentric coordinates, got shape {b.shape}")
    if np.any(b < 0):
        raise InvalidBarycentric(f"negative barycentric coordinate in {b.tolist()}")
    if abs(b.sum() - 1.0) > BARY_TOL:
        raise InvalidBarycentric(f"barycentric coordinates sum to {b.sum()!r}, not 1")
    return b


def straight_point(simplex_sites, bary):
    p = np.asarray(simplex_sites, dtype=float)
    b = _check_bary(bary, len(p))
    return b @ p


def karcher_point(c, f, simplex_sites, bary, dist_fields=None, graph=None):
    """Canvas vertex minimising the weighted squared-distance energy."""
    p = np.atleast_2d(np.asarray(simplex_sites, dtype=float))
    b = _check_bary(bary, len(p))
    if dist_fields is None:
        if graph is None:
            graph = EdgeGraph(c, f)
        dist_fields = np.stack([graph.distances_from(v) for v in snap_sites(c, p)])
    energy = 0.5 * np.einsum("k,kn->n", b, np.asarray(dist_fields) ** 2)
    return c.vertices[int(np.argmin(energy))].copy()


def barycentric_grid(k, resolution):
    """All barycentric tuples of ``k`` entries with denominator ``resolution``."""
    out = []
    for combo in product(range(resolution + 1), repeat=k - 1):
        s = sum(combo)
        if s <= resolution:
            out.append(tuple(combo) + (resolution - s,))
    return np.array(out, dtype=float) / resolution


def realize(cx, sites, dim, mode="straight", c=None, f=None, sample_resolution=5, graph=None):
    p = np.asarray(sites, dtype=float)
    rc = RealizedComplex(cx, p, mode)
    if mode == "straight":
        return rc
    if mode != "curved":
        raise ValueError(f"unknown realisation mode {mode!r}")
    if graph is None:
        graph = EdgeGraph(c, f)
    fields_ = {}
    src = snap_sites(c, p)
    used = sorted({i for s in cx.of_dim(dim) for i in s} | {i for s in cx.of_dim(1) for i in s})
    for i in used:
        fields_[i] = graph.distances_from(src[i])
    # edges carry the curved polylines; top simplices carry the full sample clouds
    for k in (1, dim):
        grid = barycentric_grid(k + 1, sample_resolution)
        for s in cx.of_dim(k):
            dist = np.stack([fields_[i] for i in s])
            rc.curved_samples[s] = [(b, karcher_point(c, f, p[list(s)], b, dist)) for b in grid]
    return rc


def straightening_gap(c, f, cx, sites, psi0, epsilon, sample_resolution=5, graph=None):
    """``(max |karcher - straight|, eps * sqrt(128 (psi0 - 1)))`` over barycentric grids."""
    p = np.asarray(sites, dtype=float)
    dim = c.dim
    rc = realize(cx, p, dim, "curved", c, f, sample_resolution, graph=graph)
    gap = 0.0
    for s in cx.of_dim(dim):
        for b, x in rc.curved_samples[s]:
            gap = max(gap, float(np.linalg.norm(x - b @ p[list(s)])))
    return gap, straightening_bound(epsilon, psi0)


def _orient(p):
    d = p[1:] - p[0]
    return float(np.linalg.det(d))


def _coherent_signs(tops):
    """Orientation sign each top simplex must have for the complex to be
    coherently oriented, per connected component (BFS over shared facets)."""
    facet_owner = {}
    for t, s in enumerate(tops):
        for drop in range(len(s)):
            facet_owner.setdefault(s[:drop] + s[drop + 1:], []).append((t, drop))
    want = [0] * len(tops)
    for start in range(len(tops)):
        if want[start]:
            continue
        want[start] = 1
        queue = deque([start])
        while queue:
            t = queue.popleft()
            s = tops[t]
            for drop in range(len(s)):
                facet = s[:drop] + s[drop + 1:]
                for u, udrop in facet_owner[facet]:
                    if u == t or want[u]:
                        continue
                    # sorted tuples: orientations agree when the dropped
                    # positions have opposite parity sum
                    want[u] = -want[t] if (drop + udrop) % 2 == 0 else want[t]
                    queue.append(u)
    return want


def _sat_overlap(a, b, tol):
    """Interior overlap of two simplices (triangles in 2D, tetrahedra in 3D)
    via separating axes; touching within ``tol`` is not overlap."""
    dim = a.shape[1]
    axes = []
    for s in (a, b):
        for drop in range(len(s)):
            face = np.delete(s, drop, axis=0)
            if dim == 2:
                e = face[1] - face[0]
                axes.append(np.array([-e[1], e[0]]))
            else:
                axes.append(np.cross(face[1] - face[0], face[2] - face[0]))
    if dim == 3:
        ea = [a[j] - a[i] for i, j in combinations(range(4), 2)]
        eb = [b[j] - b[i] for i, j in combinations(range(4), 2)]
        axes.extend(np.cross(u, v) for u in ea for v in eb)
    for ax in axes:
        nrm = np.linalg.norm(ax)
        if nrm < 1e-15:
            continue
        ax = ax / nrm
        pa, pb = a @ ax, b @ ax
        if pa.max() <= pb.min() + tol or pb.max() <= pa.min() + tol:
            return False
    return True


def check_embedding(cx, sites, dim, tol=1e-12):
    """Direct test: coherent orientation plus pairwise interior overlap.

    Pairs sharing vertices are tested too. For them, overlap beyond the
    shared face shows up as a bad orientation or as a SAT overlap of the
    two interiors.
    """
    p = np.asarray(sites, dtype=float)
    if p.ndim != 2 or p.shape[1] != dim:
        raise DimensionError(f"expected (N, {dim}) site coordinates")
    tops = [tuple(s) for s in cx.of_dim(dim)]
    if not tops:
        return EmbeddingReport(0, [])
    vol = np.array([_orient(p[list(s)]) for s in tops])
    scale = max(float(np.ptp(p, axis=0).max()), 1e-300) ** dim
    flat = np.abs(vol) <= 1e-12 * scale
    want = _coherent_signs(tops)
    sign = np.where(flat, 0, np.sign(vol)).astype(int)
    agree = np.array([sign[i] == want[i] for i in range(len(tops))])
    # a component may be oriented either way: the minority is inverted
    inverted = 0
    for members in _components(tops):
        ok = int(np.sum(agree[members]))
        bad = int(np.sum(~agree[members] & ~flat[members]))
        inverted += min(ok, bad) + int(np.sum(flat[members]))
    lo = np.array([p[list(s)].min(axis=0) for s in tops])
    hi = np.array([p[list(s)].max(axis=0) for s in tops])
    pairs = []
    ext = tol * max(float(np.ptp(p, axis=0).max()), 1.0)
    for i in range(len(tops)):
        cand = np.nonzero(np.all(lo[i + 1:] < hi[i] - ext, axis=1)
                          & np.all(hi[i + 1:] > lo[i] + ext, axis=1))[0] + i + 1
        for j in cand:
            if flat[i] or flat[j]:
                continue
            if _sat_overlap(p[list(tops[i])], p[list(tops[j])], ext):
                pairs.append((tops[i], tops[int(j)]))
    return EmbeddingReport(int(inverted), pairs, [tops[i] for i in np.nonzero(flat)[0]])


def _components(tops):
    parent = list(range(len(tops)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    owner = {}
    for t, s in enumerate(tops):
        for drop in range(len(s)):
            facet = s[:drop] + s[drop + 1:]
            if facet in owner:
                parent[find(t)] = find(owner[facet])
            else:
                owner[facet] = t
    groups = {}
    for t in range(len(tops)):
        groups.setdefault(find(t), []).append(t)
    return [np.array(g) for g in groups.values()]


def min_altitude(cx, sites, dim):
    """Smallest vertex-to-opposite-facet distance over top simplices."""
    p = np.asarray(sites, dtype=float)
    best = np.inf
    for s in cx.of_dim(dim):
        q = p[list(s)]
        for k in range(dim + 1):
            face = np.delete(q, k, axis=0)
            basis = (face[1:] - face[0]).T
            coef, *_ = np.linalg.lstsq(basis, q[k] - face[0], rcond=None)
            best = min(best, float(np.linalg.norm(q[k] - face[0] - basis @ coef)))
    return best
