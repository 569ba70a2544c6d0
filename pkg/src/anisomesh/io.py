"""
Text formats and atomic file output.

sites (.txt)
    One point per line, whitespace-separated floats; ``#`` starts a comment.
metric config (key=value)
    ``kind=<name>``, optional ``dim=<int>``, ``param.<name>=<float>``. The
    ``custom_grid`` kind also takes ``grid=<path>`` (relative to the config
    file) holding ``nx * ny`` cells of ``g11 g12 g22`` in row-major order,
    ``y`` outermost; ``.csv``/``.txt`` files are comma- or
    whitespace-separated text, anything else raw little-endian float64.
complex (.cplx)
    One simplex per line as sorted site indices. Maximal simplices carry a
    ``# witness <cell>`` comment.
"""
import json
import math
import os
from pathlib import Path
import re
import tempfile

import numpy as np

from .drvd import AbstractComplex, closure
from .errors import ParseError
from .metric_field import from_params

_FLOAT = re.compile(r"\S+")


def atomic_write(path, data):
    """Write ``data`` (str or bytes) to ``path`` through a temp file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": "\n"})) as fh:
            fh.write(data)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(x):
    return repr(float(x))


def _strip_comment(line):
    k = line.find("#")
    return line if k < 0 else line[:k]


def parse_sites(text, path=None):
    rows = []
    width = None
    for ln, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        vals = []
        for m in _FLOAT.finditer(line):
            try:
                v = float(m.group())
            except ValueError:
                raise ParseError(f"not a number: {m.group()!r}", path, ln, m.start() + 1) from None
            if not math.isfinite(v):
                raise ParseError(f"non-finite coordinate {m.group()!r}", path, ln, m.start() + 1)
            vals.append(v)
        if not vals:
            continue
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise ParseError(f"expected {width} coordinates, found {len(vals)}", path, ln, 1)
        rows.append(vals)
    if not rows:
        return np.zeros((0, 0))
    return np.array(rows, dtype=float)


def read_sites(path):
    return parse_sites(Path(path).read_text(encoding="utf-8"), str(path))


def format_sites(sites):
    p = np.atleast_2d(np.asarray(sites, dtype=float))
    return "".join(" ".join(_fmt(x) for x in row) + "\n" for row in p)


def write_sites(path, sites):
    atomic_write(path, format_sites(sites))


def parse_config(text, path=None):
    """Parse ``key=value`` lines into a dict of strings; duplicates are errors."""
    out = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        if "=" not in line:
            raise ParseError("expected key=value", path, ln, len(line) - len(line.lstrip()) + 1)
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ParseError("empty key", path, ln, 1)
        if key in out:
            raise ParseError(f"duplicate key {key!r}", path, ln, 1)
        out[key] = (value.strip(), ln, line.index("=") + 2)
    return out


def _as_float(entry, key, path):
    value, ln, col = entry
    try:
        v = float(value)
    except ValueError:
        raise ParseError(f"{key}: not a number: {value!r}", path, ln, col) from None
    if not math.isfinite(v):
        raise ParseError(f"{key}: non-finite value", path, ln, col)
    return v


def parse_metric_config(text, path=None, base_dir=None):
    cfg = parse_config(text, path)
    if "kind" not in cfg:
        raise ParseError("missing required key 'kind'", path, 1, 1)
    kind = cfg["kind"][0]
    dim = 2
    if "dim" in cfg:
        value, ln, col = cfg["dim"]
        if value not in ("2", "3"):
            raise ParseError(f"dim must be 2 or 3, got {value!r}", path, ln, col)
        dim = int(value)
    params = {}
    for key, entry in cfg.items():
        if key.startswith("param."):
            params[key[len("param."):]] = _as_float(entry, key, path)
        elif key not in ("kind", "dim", "grid"):
            raise ParseError(f"unknown key {key!r}", path, entry[1], 1)
    grid = None
    if kind == "custom_grid":
        if "grid" not in cfg:
            raise ParseError("custom_grid needs a 'grid' key", path, cfg["kind"][1], 1)
        for k in ("nx", "ny"):
            if k not in params or params[k] != int(params[k]) or params[k] < 1:
                raise ParseError(f"custom_grid needs a positive integer param.{k}", path, cfg["kind"][1], 1)
        gpath = Path(cfg["grid"][0])
        if not gpath.is_absolute():
            gpath = Path(base_dir or ".") / gpath
        grid = read_grid(gpath, int(params["nx"]), int(params["ny"]))
        params = {k: v for k, v in params.items() if k not in ("nx", "ny")}
    try:
        return from_params(kind, params, dim, grid)
    except TypeError as exc:
        raise ParseError(f"bad parameters for {kind}: {exc}", path, cfg["kind"][1], 1) from None
    except ValueError as exc:
        raise ParseError(str(exc), path, cfg["kind"][1], 1) from None


def read_metric_config(path):
    path = Path(path)
    return parse_metric_config(path.read_text(encoding="utf-8"), str(path), path.parent)


def format_metric_config(f, grid_name=None):
    lines = [f"kind={f.kind}", f"dim={f.dim}"]
    params = dict(f.params)
    for k in sorted(params):
        v = params[k]
        if f.kind == "custom_grid" and k in ("nx", "ny"):
            lines.append(f"param.{k}={int(v)}")
        else:
            lines.append(f"param.{k}={_fmt(v)}")
    if f.kind == "custom_grid":
        lines.append(f"grid={grid_name or 'grid.csv'}")
    return "\n".join(lines) + "\n"


def read_grid(path, nx, ny):
    path = Path(path)
    n = nx * ny * 3
    if path.suffix.lower() in (".csv", ".txt"):
        vals = []
        for ln, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            line = _strip_comment(raw).replace(",", " ")
            for m in _FLOAT.finditer(line):
                try:
                    vals.append(float(m.group()))
                except ValueError:
                    raise ParseError(f"not a number: {m.group()!r}", str(path), ln, m.start() + 1) from None
        a = np.array(vals, dtype=float)
    else:
        a = np.fromfile(path, dtype="<f8")
    if a.size != n:
        raise ParseError(f"grid holds {a.size} values, expected nx*ny*3 = {n}", str(path), None, None)
    return a.reshape(ny, nx, 3)


def write_grid(path, values):
    g = np.asarray(values, dtype=float).reshape(-1, 3)
    if Path(path).suffix.lower() in (".csv", ".txt"):
        atomic_write(path, "".join(",".join(_fmt(x) for x in row) + "\n" for row in g))
    else:
        atomic_write(path, g.astype("<f8").tobytes())


def format_complex(cx, n_sites=None, dim=None):
    head = "# anisomesh complex"
    if dim is not None:
        head += f" dim={dim}"
    if n_sites is not None:
        head += f" sites={n_sites}"
    lines = [head]
    for s in sorted(cx.simplices, key=lambda t: (len(t), t)):
        line = " ".join(str(i) for i in s)
        if s in cx.witness:
            line += f"  # witness {cx.witness[s]}"
        lines.append(line)
    return "\n".join(lines) + "\n"


_WITNESS = re.compile(r"witness\s+(\d+)")


def parse_complex(text, path=None):
    tops, witness = [], {}
    for ln, raw in enumerate(text.splitlines(), 1):
        body = _strip_comment(raw)
        toks = body.split()
        if not toks:
            continue
        s = []
        for m in _FLOAT.finditer(body):
            tok = m.group()
            if not tok.isdigit():
                raise ParseError(f"site index must be a non-negative integer, got {tok!r}", path, ln, m.start() + 1)
            s.append(int(tok))
        if len(set(s)) != len(s):
            raise ParseError("simplex repeats a site", path, ln, 1)
        s = tuple(sorted(s))
        tops.append(s)
        w = _WITNESS.search(raw[len(body):])
        if w:
            witness[s] = int(w.group(1))
    return AbstractComplex(closure(tops), witness)


def write_complex(path, cx, n_sites=None, dim=None):
    atomic_write(path, format_complex(cx, n_sites, dim))


def read_complex(path):
    return parse_complex(Path(path).read_text(encoding="utf-8"), str(path))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def format_json(obj):
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj):
    atomic_write(path, format_json(obj))


def format_off(c):
    """2D canvas as OFF with ``z = 0``."""
    lines = ["OFF", f"{c.n_vertices} {c.n_cells} 0"]
    lines += [f"{_fmt(x)} {_fmt(y)} 0.0" for x, y in c.vertices]
    lines += ["3 " + " ".join(str(int(v)) for v in t) for t in c.cells]
    return "\n".join(lines) + "\n"


def format_medit(c):
    """3D canvas as MEDIT .mesh (1-based indices)."""
    lines = ["MeshVersionFormatted 2", "Dimension 3", "Vertices", str(c.n_vertices)]
    lines += [" ".join(_fmt(x) for x in v) + " 0" for v in c.vertices]
    lines += ["Tetrahedra", str(c.n_cells)]
    lines += [" ".join(str(int(v) + 1) for v in t) + " 0" for t in c.cells]
    lines.append("End")
    return "\n".join(lines) + "\n"


def write_canvas(path, c):
    atomic_write(path, format_off(c) if c.dim == 2 else format_medit(c))


def read_off(path):
    toks = Path(path).read_text(encoding="utf-8").split()
    if not toks or toks[0] != "OFF":
        raise ParseError("missing OFF header", str(path), 1, 1)
    nv, nf = int(toks[1]), int(toks[2])
    k = 4
    v = np.array(toks[k:k + 3 * nv], dtype=float).reshape(nv, 3)
    k += 3 * nv
    faces = []
    for _ in range(nf):
        m = int(toks[k])
        faces.append([int(t) for t in toks[k + 1:k + 1 + m]])
        k += 1 + m
    return v, np.array(faces, dtype=np.int64)
