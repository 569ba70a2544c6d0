"""
Brute-force Delaunay oracle.

Every ``(dim+1)``-tuple of sites is tested for an empty circumball; the
result is the ground truth the discrete complex is compared against.
``O(N^(dim+2))`` work, meant for a hundred sites or fewer.
"""
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .drvd import AbstractComplex, closure
from .errors import DimensionError, TooFewSites
from .metric_field import sqrt_metric

COCIRCULAR_TOL = 1e-9
EMPTY_MARGIN = 1e-12


@dataclass(frozen=True)
class ExactDelaunay:
    simplices: frozenset
    top: list  # sorted (dim+1)-tuples
    circumcenters: np.ndarray  # in the coordinates the test ran in
    circumradii: np.ndarray
    degenerate: bool

    def as_complex(self):
        return AbstractComplex(self.simplices)


def circumcenters(points):
    """Circumcentres and radii of a batch of simplices, shape ``(T, dim+1, dim)``.

    Solves ``2 (p_i - p_0) . c = |p_i|^2 - |p_0|^2``. Flat simplices get NaN.
    """
    p = np.asarray(points, dtype=float)
    p0 = p[:, 0, :]
    a = 2.0 * (p[:, 1:, :] - p0[:, None, :])
    b = np.sum(p[:, 1:, :] ** 2, axis=2) - np.sum(p0 ** 2, axis=1)[:, None]
    det = np.linalg.det(a)
    scale = np.max(np.linalg.norm(a, axis=2), axis=1) ** a.shape[1]
    ok = np.abs(det) > 1e-12 * np.maximum(scale, 1e-300)
    c = np.full(p0.shape, np.nan)
    if np.any(ok):
        c[ok] = np.linalg.solve(a[ok], b[ok][..., None])[..., 0]
    r = np.linalg.norm(c - p0, axis=1)
    return c, r


def euclidean_delaunay_bruteforce(sites, dim=2):
    p = np.asarray(sites, dtype=float)
    if p.ndim != 2 or p.shape[1] != dim:
        raise DimensionError(f"expected (N, {dim}) sites, got shape {p.shape}")
    n = len(p)
    if n < dim + 1:
        raise TooFewSites(f"need at least {dim + 1} sites, got {n}")
    tuples = np.array(list(combinations(range(n), dim + 1)), dtype=np.int64)
    top, centers, radii = [], [], []
    degenerate = False
    for chunk in np.array_split(tuples, max(1, len(tuples) // 20000)):
        c, r = circumcenters(p[chunk])
        ok = np.isfinite(r)
        chunk, c, r = chunk[ok], c[ok], r[ok]
        d = np.linalg.norm(p[None, :, :] - c[:, None, :], axis=2)  # (T, N)
        member = np.zeros(d.shape, dtype=bool)
        np.put_along_axis(member, chunk, True, axis=1)
        d = np.where(member, np.inf, d)
        gap = d - r[:, None]
        empty = np.all(gap >= -EMPTY_MARGIN * np.maximum(r[:, None], 1.0), axis=1)
        on_sphere = np.any(np.abs(gap) <= COCIRCULAR_TOL * r[:, None], axis=1)
        degenerate |= bool(np.any(empty & on_sphere))
        top.extend(map(tuple, chunk[empty].tolist()))
        centers.append(c[empty])
        radii.append(r[empty])
    centers = np.concatenate(centers) if centers else np.zeros((0, dim))
    radii = np.concatenate(radii) if radii else np.zeros(0)
    simplices = closure(top) if top else frozenset((i,) for i in range(n))
    # isolated sites (all collinear input) still count as vertices
    simplices = simplices | frozenset((i,) for i in range(n))
    return ExactDelaunay(simplices, top, centers, radii, degenerate)


def stretch_sites(sites, m):
    """Map every site through ``F = sqrt(m)``; Euclidean distances of the
    images equal ``m``-distances of the originals."""
    f = sqrt_metric(m)
    return np.asarray(sites, dtype=float) @ f.T


def unstretch_points(points, m):
    return np.asarray(points, dtype=float) @ np.linalg.inv(sqrt_metric(m)).T


def uniform_delaunay(sites, m, dim=2):
    """Delaunay complex under the constant metric ``m``, indexed like ``sites``.

    Circumcentres are returned in the original coordinates; radii are
    ``m``-lengths.
    """
    ex = euclidean_delaunay_bruteforce(stretch_sites(sites, m), dim)
    centers = unstretch_points(ex.circumcenters, m) if len(ex.circumcenters) else ex.circumcenters
    return ExactDelaunay(ex.simplices, ex.top, centers, ex.circumradii, ex.degenerate)


def power_protection(sites, ex, m=None):
    """Exact protection ``delta``: min over top simplices of
    ``sqrt(d(c, q)^2 - r^2)`` with ``q`` the nearest site outside the simplex."""
    p = np.asarray(sites, dtype=float)
    if m is not None:
        p = stretch_sites(p, m)
        c = stretch_sites(ex.circumcenters, m)
    else:
        c = ex.circumcenters
    if not ex.top or len(p) <= len(ex.top[0]):
        return None
    best = np.inf
    for s, cc, r in zip(ex.top, c, ex.circumradii):
        d = np.linalg.norm(p - cc, axis=1)
        d[list(s)] = np.inf
        best = min(best, d.min() ** 2 - r * r)
    return float(np.sqrt(max(best, 0.0)))
