"""
SVG rendering of 2D discrete diagrams with matplotlib.

Cells owned by one site are filled with that site's palette colour;
cells carrying several colours stay white, which draws the bisectors as
white bands one canvas cell thick. The dual complex is drawn in black,
either straight or through the curved samples of a RealizedComplex.
"""
import colorsys
import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.collections import LineCollection, PolyCollection  # noqa: E402
import numpy as np  # noqa: E402

from .errors import Unsupported  # noqa: E402

GOLDEN = 0.6180339887498949
RASTER_CELLS = 40_000


def site_color(i):
    """Deterministic pastel colour for site ``i``."""
    h = (i * GOLDEN) % 1.0
    s = 0.45 + 0.25 * ((i * 7) % 3) / 2
    return colorsys.hsv_to_rgb(h, s, 0.92)


def palette(n):
    return np.array([site_color(i) for i in range(n)])


def cell_fill(d):
    """``(n_cells, 3)`` RGB fills: palette colour for single-colour cells, white otherwise."""
    col = d.cell_colors
    single = np.all(col == col[:, :1], axis=1)
    fill = np.ones((len(col), 3))
    pal = palette(d.n_sites)
    fill[single] = pal[col[single, 0]]
    return fill


def render_svg(d, realized=None, path=None, sites=None, title=None, rasterize=None):
    """Render the diagram; returns the SVG text and writes it when ``path`` is given."""
    c = d.canvas
    if c.dim != 2:
        raise Unsupported("SVG rendering is only available for 2D diagrams")
    with plt.rc_context({"svg.hashsalt": "anisomesh", "svg.fonttype": "none",
                         "path.simplify": False}):
        span = c.hi - c.lo
        w = 6.0
        fig, ax = plt.subplots(figsize=(w, max(w * span[1] / span[0], 1.0)))
        polys = c.vertices[c.cells]
        if rasterize is None:
            rasterize = c.n_cells > RASTER_CELLS
        pc = PolyCollection(polys, facecolors=cell_fill(d), edgecolors="face", linewidths=0.1,
                            rasterized=rasterize)
        ax.add_collection(pc)
        if realized is not None:
            p = realized.site_coords
            segs = []
            for s in realized.complex.of_dim(1):
                if realized.mode == "curved" and s in realized.curved_samples:
                    pts = sorted(realized.curved_samples[s], key=lambda bx: -bx[0][0])
                    segs.append(np.array([x for _, x in pts]))
                else:
                    segs.append(p[list(s)])
            ax.add_collection(LineCollection(segs, colors="black", linewidths=1.0))
        pts = np.asarray(sites if sites is not None else
                         (realized.site_coords if realized is not None else c.vertices[d.front.sources]))
        ax.plot(pts[:, 0], pts[:, 1], "o", color="black", markersize=2.5)
        ax.set_xlim(c.lo[0], c.hi[0])
        ax.set_ylim(c.lo[1], c.hi[1])
        ax.set_aspect("equal")
        ax.set_axis_off()
        if title:
            ax.set_title(title, fontsize=9)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None}, bbox_inches="tight", dpi=150)
        plt.close(fig)
    svg = buf.getvalue()
    if path is not None:
        from .io import atomic_write
        atomic_write(path, svg)
    return svg
