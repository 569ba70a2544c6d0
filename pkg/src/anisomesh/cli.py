"""Command-line driver: ``anisomesh <command> [options]``."""
import argparse
import os
from pathlib import Path
import platform
import sys

import numpy as np

from . import __version__
from .bounds import TheoryParams, evaluate_bounds
from .canvas import build_canvas, max_edge_length, site_domain
from .conformance import (verify_encompassing, verify_equality, verify_refinement,
                          verify_separation)
from .drvd import color_canvas, extract_complex
from .errors import AnisoMeshError, DegenerateSites, ParseError
from .geodesic import EdgeGraph
from .io import (atomic_write, format_json, parse_config, read_complex, read_metric_config,
                 read_sites, write_canvas, write_complex, write_json, write_sites)
from .metric_field import euclidean, region_distortion_bound
from .nets import generate_net, net_report
from .realization import check_embedding, min_altitude, realize, straightening_gap
from .render import render_svg

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_ERROR = 0, 1, 2, 3


def _threads(args):
    env = os.environ.get("ANISOMESH_THREADS")
    n = int(env) if env else args.threads
    if n:
        import numba
        numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))
    return n


def _field(args, dim):
    if args.metric:
        f = read_metric_config(args.metric)
        if f.dim != dim:
            raise ParseError(f"metric dimension {f.dim} does not match --dim {dim}", args.metric)
        return f
    return euclidean(dim)


def _sites(args):
    p = read_sites(args.sites)
    if p.size == 0:
        raise ParseError("no sites in file", args.sites)
    if p.shape[1] != args.dim:
        raise ParseError(f"sites have {p.shape[1]} coordinates, expected {args.dim}", args.sites, 1, 1)
    return p


def _bbox(args, sites=None):
    if args.bbox:
        v = args.bbox
        d = args.dim
        if len(v) != 2 * d:
            raise ParseError(f"--bbox needs {2 * d} numbers")
        return np.array(v[:d]), np.array(v[d:])
    if sites is None:
        return np.zeros(args.dim), np.ones(args.dim)
    span = float(np.ptp(sites, axis=0).max()) if len(sites) > 1 else 1.0
    margin = args.margin if args.margin is not None else 0.1 * max(span, 1e-9)
    return site_domain(sites, margin)


def _canvas(args, sites=None):
    lo, hi = _bbox(args, sites)
    return build_canvas((lo, hi), args.canvas_edge, args.dim, max_vertices=args.max_vertices)


class Run:
    def __init__(self, args):
        self.args = args
        self.out = Path(args.out)
        self.outputs = []

    def path(self, name):
        return self.out / name

    def write(self, name, data):
        atomic_write(self.path(name), data)
        self.outputs.append(name)

    def json(self, name, obj):
        self.write(name, format_json(obj))

    def manifest(self, status, extra=None):
        a = {k: v for k, v in vars(self.args).items() if k not in ("func",)}
        import matplotlib
        import numba
        import scipy
        m = {
            "command": self.args.command,
            "arguments": a,
            "status": status,
            "outputs": sorted(self.outputs),
            "versions": {"anisomesh": __version__, "python": platform.python_version(),
                         "numpy": np.__version__, "scipy": scipy.__version__,
                         "numba": numba.__version__, "matplotlib": matplotlib.__version__},
        }
        if extra:
            m.update(extra)
        write_json(self.path("manifest.json"), m)


def cmd_canvas(run):
    a = run.args
    c = _canvas(a)
    name = "canvas.off" if a.dim == 2 else "canvas.mesh"
    write_canvas(run.path(name), c)
    run.outputs.append(name)
    st = max_edge_length(c, _field(a, a.dim))
    run.json("canvas.json", {"shape": list(c.shape), "vertices": c.n_vertices, "cells": c.n_cells,
                             "step": c.step, "e_max": st.e_max, "e_max_metric": st.e_max_metric,
                             "edge_count": st.edge_count, "bbox": [c.lo, c.hi]})
    return EXIT_OK


def cmd_net(run):
    a = run.args
    c = _canvas(a)
    f = _field(a, a.dim)
    if a.seed_point:
        seed = np.array(a.seed_point, dtype=float)
    else:
        rng = np.random.default_rng(a.seed)
        seed = c.lo + rng.random(a.dim) * (c.hi - c.lo)
    g = EdgeGraph(c, f, method=a.method)
    sites = generate_net(c, f, a.epsilon_target, seed, graph=g)
    write_sites(run.path("sites.txt"), sites)
    run.outputs.append("sites.txt")
    rep = net_report(c, f, sites, graph=g)
    run.json("net_report.json", dict(rep.to_dict(), seed_point=seed, epsilon_target=a.epsilon_target))
    return EXIT_OK


def _diagram(a, sites):
    c = _canvas(a, sites)
    f = _field(a, a.dim)
    g = EdgeGraph(c, f, method=a.method)
    return c, f, g, color_canvas(c, f, sites, graph=g)


def cmd_color(run):
    a = run.args
    sites = _sites(a)
    c, f, g, d = _diagram(a, sites)
    lines = ["# x y dist color"]
    for x, dd, col in zip(c.vertices, d.front.dist, d.front.color):
        lines.append(" ".join(repr(float(v)) for v in x) + f" {float(dd)!r} {int(col)}")
    run.write("colors.txt", "\n".join(lines) + "\n")
    run.json("color.json", {"canvas_vertices": c.n_vertices, "bbox": [c.lo, c.hi],
                            "cells_per_site": [len(x) for x in d.cells],
                            "epsilon_hat": float(d.front.dist.max())})
    return EXIT_OK


def cmd_complex(run):
    a = run.args
    sites = _sites(a)
    c, f, g, d = _diagram(a, sites)
    cx = extract_complex(d)
    write_complex(run.path("complex.cplx"), cx, len(sites), a.dim)
    run.outputs.append("complex.cplx")
    return EXIT_OK


def cmd_realize(run):
    a = run.args
    sites = _sites(a)
    c, f, g, d = _diagram(a, sites)
    cx = read_complex(a.complex) if a.complex else extract_complex(d)
    emb = check_embedding(cx, sites, a.dim)
    out = {"embedding": emb.to_dict(), "mode": a.mode}
    if cx.of_dim(a.dim):
        out["min_altitude"] = min_altitude(cx, sites, a.dim)
    if a.mode == "curved":
        psi0 = region_distortion_bound(f, f(sites[0]), c.vertices) if not f.is_uniform else 1.0
        eps = float(d.front.dist.max())
        gap, bound = straightening_gap(c, f, cx, sites, psi0, eps, a.resolution, graph=g)
        out.update(max_gap=gap, bound=bound, psi0=psi0, epsilon_hat=eps)
    run.json("realize.json", out)
    ok = emb.embedded
    return EXIT_VERIFY if a.assert_ and not ok else EXIT_OK


def cmd_verify(run):
    a = run.args
    sites = _sites(a)
    what = a.what
    if what == "equality":
        f = _field(a, a.dim)
        if not f.is_uniform:
            raise ParseError("equality needs a euclidean or uniform metric")
        m = None if f.kind == "euclidean" else f.uniform_matrix()
        dom = None if not a.bbox else _bbox(a)
        try:
            r = verify_equality(sites, a.canvas_edge, m, domain=dom, max_vertices=a.max_vertices,
                                method=a.method)
        except DegenerateSites as exc:
            run.json("verify.json", {"skipped": str(exc)})
            return EXIT_OK
        res, ok = r.to_dict(), r.equal
    elif what == "separation":
        f = _field(a, a.dim)
        m = None if f.kind == "euclidean" else f.uniform_matrix()
        r = verify_separation(sites, m)
        res, ok = r.to_dict(), r.vertices_ok and r.faces_ok
    elif what == "encompassing":
        c, f, g, d = _diagram(a, sites)
        r = verify_encompassing(sites, f, a.site_index, c, graph=g)
        res, ok = r.to_dict(), r.holds
    else:
        f = _field(a, a.dim)
        r = verify_refinement(sites, f, _bbox(a, sites), a.canvas_edge, a.max_vertices)
        res, ok = r.to_dict(), r.equal
    run.json("verify.json", dict(res, check=what, passed=bool(ok)))
    return EXIT_VERIFY if a.assert_ and not ok else EXIT_OK


_PARAM_KEYS = ("epsilon", "mu", "delta", "psi0", "lambda_min_eigen", "lambda_max_eigen",
               "sec_curv_lo", "sec_curv_hi", "inj_radius", "iota", "lambda")


def cmd_bounds(run):
    a = run.args
    vals = {}
    if a.params:
        text = Path(a.params).read_text(encoding="utf-8")
        for key, (value, ln, col) in parse_config(text, a.params).items():
            if key not in _PARAM_KEYS:
                raise ParseError(f"unknown parameter {key!r}", a.params, ln, 1)
            try:
                vals[key] = float(value)
            except ValueError:
                raise ParseError(f"{key}: not a number: {value!r}", a.params, ln, col) from None
    for k in ("epsilon", "mu", "delta", "psi0"):
        v = getattr(a, k)
        if v is not None:
            vals[k] = v
    p = TheoryParams.from_dict(vals)
    rep = evaluate_bounds(p, a.dim, a.xi)
    run.json("bounds.json", dict(rep.to_dict(), params=vals, dim=a.dim, xi=a.xi))
    if a.print:
        sys.stdout.write(format_json(rep.to_dict()))
    return EXIT_OK


def cmd_render(run):
    a = run.args
    sites = _sites(a)
    c, f, g, d = _diagram(a, sites)
    rc = None
    if a.dual != "none":
        cx = extract_complex(d)
        rc = realize(cx, sites, a.dim, a.dual, c, f, a.resolution, graph=g)
    render_svg(d, rc, run.path("diagram.svg"), sites=sites)
    run.outputs.append("diagram.svg")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="anisomesh", description=__doc__)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, sites=True, canvas=True):
        p.add_argument("-o", "--out", default=".", help="output directory")
        p.add_argument("--dim", type=int, choices=(2, 3), default=2)
        p.add_argument("--threads", type=int, default=0, help="worker threads (env ANISOMESH_THREADS wins)")
        p.add_argument("--seed", type=int, default=42, help="RNG seed")
        p.add_argument("--assert", dest="assert_", action="store_true",
                       help="exit 1 when a verification fails")
        if sites:
            p.add_argument("--sites", required=True)
        if canvas:
            p.add_argument("--metric", help="metric config file (key=value); euclidean if omitted")
            p.add_argument("--canvas-edge", type=float, required=True)
            p.add_argument("--bbox", type=float, nargs="+", help="lo... hi... of the canvas box")
            p.add_argument("--margin", type=float, help="site-box inflation when --bbox is absent")
            p.add_argument("--max-vertices", type=int, default=5_000_000)
            p.add_argument("--method", choices=("vector", "graph"), default="vector")

    p = sub.add_parser("canvas", help="build a canvas and export it")
    common(p, sites=False)
    p.set_defaults(func=cmd_canvas)

    p = sub.add_parser("net", help="farthest-point net and its certificate")
    common(p, sites=False)
    p.add_argument("--epsilon-target", type=float, required=True)
    p.add_argument("--seed-point", type=float, nargs="+")
    p.set_defaults(func=cmd_net)

    p = sub.add_parser("color", help="colour the canvas by nearest site")
    common(p)
    p.set_defaults(func=cmd_color)

    p = sub.add_parser("complex", help="extract the discrete Delaunay complex")
    common(p)
    p.set_defaults(func=cmd_complex)

    p = sub.add_parser("realize", help="realise a complex and check embedding")
    common(p)
    p.add_argument("--complex", help="complex file; extracted from the canvas if omitted")
    p.add_argument("--mode", choices=("straight", "curved"), default="straight")
    p.add_argument("--resolution", type=int, default=5)
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("verify", help="verification suites")
    p.add_argument("what", choices=("equality", "separation", "encompassing", "refinement"))
    common(p)
    p.add_argument("--site-index", type=int, default=0, help="p0 for encompassing")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bounds", help="evaluate closed-form bounds")
    common(p, sites=False, canvas=False)
    p.add_argument("--params", help="key=value parameter file")
    for k in ("epsilon", "mu", "delta", "psi0"):
        p.add_argument(f"--{k}", type=float)
    p.add_argument("--xi", type=float, default=0.0)
    p.add_argument("--print", action="store_true", help="also print the report")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("render", help="SVG of the diagram and its dual")
    common(p)
    p.add_argument("--dual", choices=("none", "straight", "curved"), default="straight")
    p.add_argument("--resolution", type=int, default=5)
    p.set_defaults(func=cmd_render)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    run = Run(args)
    try:
        _threads(args)
        code = args.func(run)
    except ParseError as exc:
        print(f"anisomesh: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (AnisoMeshError, OSError) as exc:
        print(f"anisomesh: {type(exc).__name__}: {exc}", file=sys.stderr)
        try:
            run.manifest("error", {"error": f"{type(exc).__name__}: {exc}"})
        except OSError:
            pass
        return EXIT_ERROR
    run.manifest("ok" if code == EXIT_OK else "verification-failed")
    return code


if __name__ == "__main__":
    sys.exit(main())
