"""
Discrete Riemannian Voronoi diagram and its Delaunay complex.

A canvas cell belongs to the discrete Voronoi cell of every site whose
colour appears among its vertices, so neighbouring cells overlap by one
canvas cell. A canvas cell whose vertices carry the colours ``S``
witnesses the abstract simplex ``S`` and all its faces. Only
top-dimensional canvas cells are scanned: a lower-dimensional canvas
face with colours ``S`` is always contained in a top cell whose colour
set contains ``S``.
"""
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import InvalidSite
from .geodesic import multi_front_dijkstra


@dataclass(frozen=True)
class DiscreteDiagram:
    canvas: object
    front: object
    cells: list  # per-site arrays of canvas cell ids

    @property
    def n_sites(self):
        return self.front.source_count

    @property
    def cell_colors(self):
        """``(n_cells, dim+1)`` vertex colours of every canvas cell."""
        return self.front.color[self.canvas.cells]

    @property
    def boundary_cells(self):
        return self.canvas.boundary_cell_mask


@dataclass(frozen=True)
class AbstractComplex:
    simplices: frozenset
    witness: dict = field(default_factory=dict)

    def __contains__(self, s):
        return tuple(sorted(s)) in self.simplices

    def __len__(self):
        return len(self.simplices)

    def of_dim(self, k):
        return sorted(s for s in self.simplices if len(s) == k + 1)

    @property
    def maximal(self):
        return maximal_simplices(self.simplices)

    @property
    def dimension(self):
        return max((len(s) - 1 for s in self.simplices), default=-1)

    def top_simplices(self, dim):
        return self.of_dim(dim)


def closure(simplices):
    """All non-empty faces of the given simplices."""
    out = set()
    for s in simplices:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return frozenset(out)


def maximal_simplices(simplices):
    closed = closure(simplices)
    faces = set()
    for s in closed:
        if len(s) > 1:
            faces.update(combinations(s, len(s) - 1))
    return sorted(s for s in closed if s not in faces)


def from_simplices(simplices):
    return AbstractComplex(closure(simplices))


def color_canvas(c, f, sites, graph=None):
    fr = multi_front_dijkstra(c, f, sites, graph=graph)
    colors = fr.color[c.cells]
    cells = []
    for s in range(fr.source_count):
        ids = np.nonzero(np.any(colors == s, axis=1))[0]
        ids.setflags(write=False)
        cells.append(ids)
    return DiscreteDiagram(c, fr, cells)


def _cell_color_sets(d):
    """Unique colour sets: ``(sets, first_cell)`` with ``sets`` padded by -1."""
    col = np.sort(d.cell_colors, axis=1)
    dup = np.zeros_like(col, dtype=bool)
    dup[:, 1:] = col[:, 1:] == col[:, :-1]
    col = np.where(dup, -1, col)
    col = -np.sort(-col, axis=1)  # distinct colours first, padding last
    uniq, first = np.unique(col, axis=0, return_index=True)
    return uniq, first


def extract_complex(d):
    uniq, first = _cell_color_sets(d)
    sets = {}
    for row, cell in zip(uniq, first):
        s = tuple(sorted(int(x) for x in row if x >= 0))
        if s not in sets or cell < sets[s]:
            sets[s] = int(cell)
    simplices = closure(sets)
    witness = {}
    for s in maximal_simplices(simplices):
        # a maximal simplex is witnessed by a cell carrying exactly its colours
        witness[s] = sets[s]
    return AbstractComplex(simplices, witness)


def witnesses_of(d, simplex):
    s = tuple(int(x) for x in simplex)
    if any(x < 0 or x >= d.n_sites for x in s):
        raise InvalidSite(f"simplex {s} references a site outside 0..{d.n_sites - 1}")
    if len(set(s)) != len(s):
        raise InvalidSite(f"simplex {s} repeats a site")
    colors = d.cell_colors
    mask = np.ones(len(colors), dtype=bool)
    for x in s:
        mask &= np.any(colors == x, axis=1)
    return np.nonzero(mask)[0].tolist()


def purity_report(cx, dim):
    """Maximal simplices whose dimension differs from ``dim`` (reported, not asserted)."""
    return [s for s in cx.maximal if len(s) != dim + 1]
