"""
Structured background triangulations ("canvases").

2D: every grid square is split into two triangles, the diagonal
alternating with the parity of ``i + j``. Vertices with even ``i + j``
then carry all four diagonals (degree 8) and the others none (degree 4).

3D: every grid cube is split into the six Kuhn tetrahedra around its
main diagonal; the split is translation invariant, hence conforming.

Per-axis steps are ``h_k = L_k / n_k`` with the smallest integer ``n_k``
such that ``h_k * sqrt(dim) <= target_edge``, so the longest edge
(the square/cube diagonal) never exceeds the target.
"""
from dataclasses import dataclass
from functools import cached_property
from itertools import permutations
import math

import numpy as np

from .errors import CanvasTooDense, DimensionError, OutOfDomain

MAX_VERTICES = 5_000_000


@dataclass(frozen=True)
class CanvasEdgeStats:
    e_max: float
    e_max_metric: float
    edge_count: int


class Canvas:
    """Immutable structured canvas; arrays are read-only after construction."""

    def __init__(self, lo, hi, shape):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        self.shape = tuple(int(n) for n in shape)
        self.dim = len(self.shape)
        if self.dim not in (2, 3):
            raise DimensionError("canvas dimension must be 2 or 3")
        self.step = (self.hi - self.lo) / np.asarray(self.shape, dtype=float)
        self.vertices = _grid_vertices(self.lo, self.step, self.shape)
        self.cells = _triangulate(self.shape)
        for a in (self.vertices, self.cells):
            a.setflags(write=False)

    def __repr__(self):
        return (f"Canvas(dim={self.dim}, shape={self.shape}, vertices={self.n_vertices}, "
                f"cells={self.n_cells})")

    @property
    def bbox(self):
        return self.lo, self.hi

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_cells(self):
        return len(self.cells)

    @cached_property
    def edges(self):
        k = self.dim + 1
        pairs = np.array([(a, b) for a in range(k) for b in range(a + 1, k)])
        e = self.cells[:, pairs].reshape(-1, 2)
        e = np.sort(e, axis=1)
        n = np.int64(self.n_vertices)
        key = np.unique(e[:, 0] * n + e[:, 1])
        e = np.stack([key // n, key % n], axis=1)
        e.setflags(write=False)
        return e

    @cached_property
    def csr(self):
        """``(indptr, indices, edge_ids)`` of the symmetric vertex adjacency."""
        e = self.edges
        n = self.n_vertices
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        eid = np.concatenate([np.arange(len(e)), np.arange(len(e))])
        order = np.lexsort((dst, src))
        src, dst, eid = src[order], dst[order], eid[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        indptr = np.cumsum(indptr)
        return indptr, dst.astype(np.int64), eid.astype(np.int64)

    def neighbors(self, v):
        indptr, indices, _ = self.csr
        return indices[indptr[v]:indptr[v + 1]]

    @cached_property
    def vertex_adjacency(self):
        indptr, indices, _ = self.csr
        return [indices[indptr[v]:indptr[v + 1]].tolist() for v in range(self.n_vertices)]

    @cached_property
    def cell_adjacency(self):
        """``(n_cells, dim+1)`` array; entry ``k`` is the cell across the facet
        opposite local vertex ``k``, or -1 on the boundary."""
        m, k = self.cells.shape
        facets = []
        for drop in range(k):
            keep = [c for c in range(k) if c != drop]
            facets.append(np.sort(self.cells[:, keep], axis=1))
        facets = np.concatenate(facets)
        owner = np.tile(np.arange(m), k)
        local = np.repeat(np.arange(k), m)
        keys, inv = np.unique(facets, axis=0, return_inverse=True)
        inv = inv.ravel()
        order = np.argsort(inv, kind="stable")
        adj = -np.ones((m, k), dtype=np.int64)
        sorted_inv = inv[order]
        same = np.nonzero(sorted_inv[1:] == sorted_inv[:-1])[0]
        a, b = order[same], order[same + 1]
        adj[owner[a], local[a]] = owner[b]
        adj[owner[b], local[b]] = owner[a]
        return adj

    def signed_volumes(self):
        p = self.vertices[self.cells]
        d = p[:, 1:, :] - p[:, :1, :]
        return np.linalg.det(d) / math.factorial(self.dim)

    def edge_lengths(self):
        e = self.edges
        return np.linalg.norm(self.vertices[e[:, 1]] - self.vertices[e[:, 0]], axis=1)

    @cached_property
    def boundary_vertex_mask(self):
        idx = self.grid_index(np.arange(self.n_vertices))
        n = np.asarray(self.shape)
        return np.any((idx == 0) | (idx == n), axis=1)

    @cached_property
    def boundary_cell_mask(self):
        return np.any(self.boundary_vertex_mask[self.cells], axis=1)

    def grid_index(self, v):
        """Integer grid coordinates of vertex ids."""
        v = np.asarray(v)
        out = []
        for n in self.shape:
            out.append(v % (n + 1))
            v = v // (n + 1)
        return np.stack(out, axis=-1)

    def vertex_id(self, idx):
        idx = np.asarray(idx)
        vid = np.zeros(idx.shape[:-1], dtype=np.int64)
        stride = 1
        for a, n in enumerate(self.shape):
            vid = vid + idx[..., a] * stride
            stride *= n + 1
        return vid

    def contains(self, points, tol=1e-12):
        p = np.atleast_2d(np.asarray(points, dtype=float))
        span = self.hi - self.lo
        return np.all((p >= self.lo - tol * span) & (p <= self.hi + tol * span), axis=1)

    def nearest_vertex(self, points):
        """Snap points to the nearest grid vertex (half-way ties round up)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        if p.shape[1] != self.dim:
            raise DimensionError(f"expected {self.dim}-d points, got shape {p.shape}")
        if not np.all(self.contains(p)):
            bad = np.nonzero(~self.contains(p))[0][0]
            raise OutOfDomain(f"point {p[bad].tolist()} lies outside the canvas box")
        idx = np.floor((p - self.lo) / self.step + 0.5).astype(np.int64)
        idx = np.clip(idx, 0, np.asarray(self.shape))
        return self.vertex_id(idx)


def _grid_vertices(lo, step, shape):
    axes = [lo[a] + step[a] * np.arange(n + 1) for a, n in enumerate(shape)]
    mesh = np.meshgrid(*axes, indexing="ij")
    # x varies fastest so that vertex_id matches grid_index
    return np.stack([m.transpose(tuple(reversed(range(len(shape))))).ravel() for m in mesh],
                    axis=1)


def _triangulate(shape):
    if len(shape) == 2:
        nx, ny = shape
        i, j = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
        i, j = i.ravel(), j.ravel()
        a = j * (nx + 1) + i
        b = a + 1
        c = b + nx + 1
        d = a + nx + 1
        even = (i + j) % 2 == 0
        t1 = np.where(even[:, None], np.stack([a, b, c], 1), np.stack([a, b, d], 1))
        t2 = np.where(even[:, None], np.stack([a, c, d], 1), np.stack([b, c, d], 1))
        out = np.empty((2 * len(a), 3), dtype=np.int64)
        out[0::2] = t1
        out[1::2] = t2
        return out
    nx, ny, nz = shape
    sx, sy = 1, nx + 1
    sz = (nx + 1) * (ny + 1)
    strides = np.array([sx, sy, sz])
    local = []
    for perm in permutations(range(3)):
        corner = np.zeros(3, dtype=int)
        tet = [corner.copy()]
        for axis in perm:
            corner[axis] = 1
            tet.append(corner.copy())
        tet = np.array(tet)
        vol = np.linalg.det(tet[1:] - tet[0])
        if vol < 0:
            tet[[2, 3]] = tet[[3, 2]]
        local.append(tet @ strides)
    local = np.array(local)  # (6, 4) offsets
    i, j, k = np.meshgrid(np.arange(nx), np.arange(ny), np.arange(nz), indexing="ij")
    base = (k * sz + j * sy + i * sx).transpose(2, 1, 0).ravel()
    return (base[:, None, None] + local[None, :, :]).reshape(-1, 4).astype(np.int64)


def grid_shape(lo, hi, target_edge, dim):
    """Cells per axis so that the longest (diagonal) edge is <= target_edge."""
    span = np.asarray(hi, dtype=float) - np.asarray(lo, dtype=float)
    if target_edge <= 0 or not np.isfinite(target_edge):
        raise ValueError("target_edge must be positive")
    if np.any(span <= 0):
        raise ValueError("bounding box is degenerate")
    h_max = target_edge / math.sqrt(dim)
    # relative slack so that exact divisors such as sqrt(2)/sqrt(2) are not bumped
    return tuple(max(1, int(math.ceil(s / h_max * (1 - 1e-12)))) for s in span)


def build_canvas(bbox, target_edge, dim=2, max_vertices=MAX_VERTICES):
    lo, hi = (np.asarray(b, dtype=float) for b in bbox)
    if lo.shape != (dim,) or hi.shape != (dim,):
        raise DimensionError(f"bounding box must have {dim} coordinates per corner")
    shape = grid_shape(lo, hi, target_edge, dim)
    n_vertices = math.prod(n + 1 for n in shape)
    if n_vertices > max_vertices:
        raise CanvasTooDense(
            f"target edge {target_edge:.4g} needs {n_vertices} vertices (cap {max_vertices})")
    return Canvas(lo, hi, shape)


def canvas_vertex_count(bbox, target_edge, dim=2):
    lo, hi = (np.asarray(b, dtype=float) for b in bbox)
    return math.prod(n + 1 for n in grid_shape(lo, hi, target_edge, dim))


def site_domain(sites, margin, clip=None):
    """Bounding box of ``sites`` inflated by ``margin`` on every side."""
    p = np.atleast_2d(np.asarray(sites, dtype=float))
    lo = p.min(axis=0) - margin
    hi = p.max(axis=0) + margin
    if clip is not None:
        lo = np.maximum(lo, clip[0])
        hi = np.minimum(hi, clip[1])
    return lo, hi


def max_edge_length(c, f):
    """Longest edge, Euclidean and measured by ``f`` at the edge midpoint."""
    e = c.edges
    a = c.vertices[e[:, 0]]
    b = c.vertices[e[:, 1]]
    d = b - a
    euclid = np.linalg.norm(d, axis=1)
    metric = _metric_lengths(f, 0.5 * (a + b), d)
    return CanvasEdgeStats(float(euclid.max()), float(metric.max()), len(e))


def _metric_lengths(f, mid, d):
    g = f.eval_many(mid)
    return np.sqrt(np.maximum(np.einsum("ni,nij,nj->n", d, g, d), 0.0))
