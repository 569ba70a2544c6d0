"""
Metrics, metric fields and distortion.

A metric is a symmetric positive-definite matrix ``G`` acting on squared
lengths: ``|v|_G^2 = v^T G v``. A metric field maps every domain point to
a metric. All evaluation is vectorised over arrays of points.

Built-in fields
---------------
``euclidean``
    ``G(p) = I``.
``uniform``
    ``G(p) = G0`` for a fixed SPD matrix, parameters ``g11, g12, g22``
    (plus ``g13, g23, g33`` in 3D).
``hyperbolic_shock``
    A ridge of strong vertical stretching concentrated around the curve
    ``y = y0 + amplitude * tanh(bend * (x - x0))``::

        s(x, y) = y - y0 - amplitude * tanh(bend * (x - x0))
        G(x, y) = diag(1, 1 + alpha^2 * sech^2(sharpness * s))

    Its distortion with respect to the identity is at most
    ``sqrt(1 + alpha^2)``, attained on the curve.
``swirl``
    Stretching along circles around ``(cx, cy)``::

        v = (-(y - cy), x - cx),  r^2 = |v|^2
        G = I + beta^2 * exp(-r^2 / radius^2) / (r^2 + core^2) * v v^T
``custom_grid``
    Per-cell SPD entries ``(g11, g12, g22)`` on a regular ``nx * ny`` grid
    over a box, bilinearly interpolated between cell centres and clamped
    outside them.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DimensionError, EmptyInput, InvalidMetric

SYMMETRY_TOL = 1e-12
EIGEN_FLOOR = 1e-12

FIELD_KINDS = ("euclidean", "uniform", "hyperbolic_shock", "swirl", "custom_grid")


def validate_metric(m):
    """Return ``m`` as a float array, raising :class:`InvalidMetric` unless SPD."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvalidMetric(f"metric must be a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidMetric("metric has non-finite entries")
    scale = max(np.abs(m).max(), 1.0)
    if np.abs(m - m.T).max() > SYMMETRY_TOL * scale:
        raise InvalidMetric("metric is not symmetric")
    w = np.linalg.eigvalsh(0.5 * (m + m.T))
    if w[0] <= EIGEN_FLOOR:
        raise InvalidMetric(f"metric is not positive definite (smallest eigenvalue {w[0]:.3g})")
    return m


def sqrt_metric(m):
    """Symmetric square root ``F`` with ``F^T F = F F = m``.

    Uses the eigendecomposition ``m = O^T D O`` and returns ``O^T sqrt(D) O``,
    which is itself SPD (unlike a Cholesky factor).
    """
    m = validate_metric(m)
    w, v = np.linalg.eigh(0.5 * (m + m.T))
    f = (v * np.sqrt(w)) @ v.T
    return 0.5 * (f + f.T)


def distortion(m1, m2):
    """``max(|F1 F2^-1|, |F2 F1^-1|)`` in the spectral norm; always >= 1."""
    f1 = sqrt_metric(m1)
    f2 = sqrt_metric(m2)
    if f1.shape != f2.shape:
        raise DimensionError(f"metric shapes differ: {f1.shape} vs {f2.shape}")
    a = np.linalg.norm(f1 @ np.linalg.inv(f2), 2)
    b = np.linalg.norm(f2 @ np.linalg.inv(f1), 2)
    return max(a, b, 1.0)


def _distortion_many(ms, ref):
    # Batched version of distortion(ms[i], ref). With F = sqrt(ref), the two
    # spectral norms are sqrt of the extreme eigenvalues of F^-1 M F^-1.
    f = sqrt_metric(ref)
    finv = np.linalg.inv(f)
    s = np.einsum("ij,njk,kl->nil", finv, ms, finv)
    s = 0.5 * (s + np.swapaxes(s, 1, 2))
    w = np.linalg.eigvalsh(s)
    if np.any(w[:, 0] <= 0):
        raise InvalidMetric("field produced a non-SPD metric")
    return np.maximum(np.sqrt(np.maximum(w[:, -1], 1.0 / w[:, 0])), 1.0)


def uniform_distance(m, x, y):
    """Exact distance ``sqrt((x-y)^T m (x-y))`` under a constant metric."""
    m = validate_metric(m)
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    if d.shape[-1] != m.shape[0]:
        raise DimensionError(f"point dimension {d.shape[-1]} does not match metric {m.shape}")
    return np.sqrt(np.maximum(np.einsum("...i,ij,...j->...", d, m, d), 0.0))


def region_distortion_bound(f, reference, sample_points):
    """Largest distortion between ``f`` and ``reference`` over the samples (psi_0)."""
    pts = np.atleast_2d(np.asarray(sample_points, dtype=float))
    if pts.size == 0 or pts.shape[0] == 0:
        raise EmptyInput("no sample points given")
    ref = validate_metric(reference)
    if pts.shape[1] != ref.shape[0]:
        raise DimensionError("sample dimension does not match reference metric")
    return float(_distortion_many(f.eval_many(pts), ref).max())


@dataclass(frozen=True)
class MetricField:
    """Immutable metric field. Build it with the module-level constructors."""

    kind: str
    dim: int
    params: dict = field(default_factory=dict)
    grid: np.ndarray = field(default=None, compare=False, repr=False)  # custom_grid: (ny, nx, 3)

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        if p.shape != (self.dim,):
            raise DimensionError(f"expected a {self.dim}-d point, got shape {p.shape}")
        return self.eval_many(p[None, :])[0]

    def eval_many(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise DimensionError(f"expected (N, {self.dim}) points, got {pts.shape}")
        return _EVALUATORS[self.kind](self, pts)

    @property
    def is_uniform(self):
        return self.kind in ("euclidean", "uniform")

    def uniform_matrix(self):
        """The constant matrix of a euclidean/uniform field."""
        if not self.is_uniform:
            raise InvalidMetric(f"{self.kind} field is not uniform")
        return self.eval_many(np.zeros((1, self.dim)))[0]


def euclidean(dim=2):
    return MetricField("euclidean", dim, {})


def uniform(matrix):
    m = validate_metric(matrix)
    n = m.shape[0]
    params = {f"g{i + 1}{j + 1}": float(m[i, j]) for i in range(n) for j in range(i, n)}
    return MetricField("uniform", n, params)


def hyperbolic_shock(alpha=3.0, sharpness=12.0, amplitude=0.25, bend=4.0,
                     x0=0.5, y0=0.5, dim=2):
    params = dict(alpha=float(alpha), sharpness=float(sharpness), amplitude=float(amplitude),
                  bend=float(bend), x0=float(x0), y0=float(y0))
    return MetricField("hyperbolic_shock", dim, params)


def swirl(beta=3.0, radius=0.4, core=0.05, cx=0.5, cy=0.5, dim=2):
    params = dict(beta=float(beta), radius=float(radius), core=float(core),
                  cx=float(cx), cy=float(cy))
    return MetricField("swirl", dim, params)


def custom_grid(values, bbox):
    """Field from per-cell ``(g11, g12, g22)`` values of shape ``(ny, nx, 3)``."""
    g = np.asarray(values, dtype=float)
    if g.ndim != 3 or g.shape[2] != 3:
        raise DimensionError(f"custom grid must have shape (ny, nx, 3), got {g.shape}")
    for e in g.reshape(-1, 3):
        validate_metric([[e[0], e[1]], [e[1], e[2]]])
    lo, hi = np.asarray(bbox[0], dtype=float), np.asarray(bbox[1], dtype=float)
    params = dict(xmin=float(lo[0]), ymin=float(lo[1]), xmax=float(hi[0]), ymax=float(hi[1]),
                  nx=float(g.shape[1]), ny=float(g.shape[0]))
    g.setflags(write=False)
    return MetricField("custom_grid", 2, params, g)


def from_params(kind, params, dim=2, grid=None):
    """Construct a field from its kind name and a flat parameter dict."""
    params = dict(params)
    if kind == "euclidean":
        return euclidean(dim)
    if kind == "uniform":
        n = dim
        m = np.eye(n)
        for i in range(n):
            for j in range(i, n):
                key = f"g{i + 1}{j + 1}"
                if key in params:
                    m[i, j] = m[j, i] = params[key]
        return uniform(m)
    if kind == "hyperbolic_shock":
        return hyperbolic_shock(dim=dim, **params)
    if kind == "swirl":
        return swirl(dim=dim, **params)
    if kind == "custom_grid":
        if grid is None:
            raise InvalidMetric("custom_grid needs a grid of values")
        bbox = ((params.get("xmin", 0.0), params.get("ymin", 0.0)),
                (params.get("xmax", 1.0), params.get("ymax", 1.0)))
        return custom_grid(grid, bbox)
    raise InvalidMetric(f"unknown field kind {kind!r}")


def _eval_euclidean(f, pts):
    return np.broadcast_to(np.eye(f.dim), (len(pts), f.dim, f.dim)).copy()


def _eval_uniform(f, pts):
    m = np.eye(f.dim)
    for i in range(f.dim):
        for j in range(i, f.dim):
            m[i, j] = m[j, i] = f.params[f"g{i + 1}{j + 1}"]
    return np.broadcast_to(m, (len(pts), f.dim, f.dim)).copy()


def _eval_shock(f, pts):
    p = f.params
    s = pts[:, 1] - p["y0"] - p["amplitude"] * np.tanh(p["bend"] * (pts[:, 0] - p["x0"]))
    ridge = 1.0 / np.cosh(np.clip(p["sharpness"] * s, -350, 350)) ** 2
    out = _eval_euclidean(f, pts)
    out[:, 1, 1] += p["alpha"] ** 2 * ridge
    return out


def _eval_swirl(f, pts):
    p = f.params
    dx = pts[:, 0] - p["cx"]
    dy = pts[:, 1] - p["cy"]
    r2 = dx * dx + dy * dy
    w = p["beta"] ** 2 * np.exp(-r2 / p["radius"] ** 2) / (r2 + p["core"] ** 2)
    out = _eval_euclidean(f, pts)
    out[:, 0, 0] += w * dy * dy
    out[:, 0, 1] -= w * dx * dy
    out[:, 1, 0] -= w * dx * dy
    out[:, 1, 1] += w * dx * dx
    return out


def _eval_custom_grid(f, pts):
    p = f.params
    g = f.grid
    ny, nx = g.shape[:2]
    # continuous cell-centre coordinates
    u = (pts[:, 0] - p["xmin"]) / (p["xmax"] - p["xmin"]) * nx - 0.5
    v = (pts[:, 1] - p["ymin"]) / (p["ymax"] - p["ymin"]) * ny - 0.5
    u = np.clip(u, 0.0, nx - 1.0)
    v = np.clip(v, 0.0, ny - 1.0)
    i0 = np.minimum(np.floor(u).astype(int), max(nx - 2, 0))
    j0 = np.minimum(np.floor(v).astype(int), max(ny - 2, 0))
    i1 = np.minimum(i0 + 1, nx - 1)
    j1 = np.minimum(j0 + 1, ny - 1)
    a = (u - i0)[:, None]
    b = (v - j0)[:, None]
    e = ((1 - a) * (1 - b) * g[j0, i0] + a * (1 - b) * g[j0, i1]
         + (1 - a) * b * g[j1, i0] + a * b * g[j1, i1])
    out = np.empty((len(pts), 2, 2))
    out[:, 0, 0] = e[:, 0]
    out[:, 0, 1] = out[:, 1, 0] = e[:, 1]
    out[:, 1, 1] = e[:, 2]
    return out


_EVALUATORS = {
    "euclidean": _eval_euclidean,
    "uniform": _eval_uniform,
    "hyperbolic_shock": _eval_shock,
    "swirl": _eval_swirl,
    "custom_grid": _eval_custom_grid,
}


def shock_alpha_for_distortion(psi0):
    """Shock strength whose distortion against the identity peaks at ``psi0``."""
    if psi0 < 1:
        raise InvalidMetric("psi0 must be >= 1")
    return math.sqrt(psi0 * psi0 - 1.0)
