"""Command-line entry point: shape parsing, density and inequality checks and CSV/JSON/SVG reports.

Exit status is 0 when every check passes, 1 when a check fails and 2 on
bad input (with a one-line diagnostic naming the offending field).
"""

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from dataclasses import dataclass

import numpy as np

from . import asymptotics, inequalities
from .bodies import (
    DEFAULT_GRID,
    Disk,
    Ellipse,
    GeometryError,
    Polygon,
    SupportGrid,
    boundary_sample,
    smooth,
)
from .density import (
    DEFAULT_POLY,
    DEFAULT_SAMPLES,
    DEFAULT_TOL,
    default_r_grid,
    density_profile,
    is_kdense,
    max_k_distance,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
COMMANDS = ("density-sweep", "check-kdense", "verify-necessary",
            "verify-inequalities", "proof-chain", "report")


class ShapeError(ValueError):
    """Invalid shape description; ``field`` names the offending entry."""

    def __init__(self, field, constraint):
        super().__init__(f"{field}: {constraint}")
        self.field = field
        self.constraint = constraint


@dataclass
class RunConfig:
    command: str
    g: str = None
    k: str = None
    r_grid: list = None
    n_samples: int = DEFAULT_SAMPLES
    n_grid: int = DEFAULT_POLY
    tol: float = None
    out_path: str = None
    format: str = "csv"
    seed: int = None
    smooth: float = None


# --- shapes ---------------------------------------------------------------


def _number(d, key, positive=False, default=None):
    if key not in d:
        if default is not None:
            return default
        raise ShapeError(key, "is required")
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ShapeError(key, "must be a finite number")
    if positive and v <= 0:
        raise ShapeError(key, "must be positive")
    return float(v)


def _point(d, key):
    v = d.get(key, [0.0, 0.0])
    try:
        p = np.asarray(v, dtype=float)
    except (TypeError, ValueError):
        raise ShapeError(key, "must be a pair of numbers") from None
    if p.shape != (2,) or not np.all(np.isfinite(p)):
        raise ShapeError(key, "must be a pair of numbers")
    return p


def from_dict(d):
    """Build a body from its JSON description (see ``to_dict`` on each kind)."""
    if not isinstance(d, dict):
        raise ShapeError("kind", "shape must be a JSON object")
    kind = d.get("kind")
    try:
        if kind == "disk":
            return Disk(_number(d, "radius", positive=True), _point(d, "center"))
        if kind == "ellipse":
            return Ellipse(_number(d, "a", positive=True), _number(d, "b", positive=True),
                           _point(d, "center"), _number(d, "rotation", default=0.0))
        if kind == "polygon":
            try:
                v = np.asarray(d.get("vertices"), dtype=float)
            except (TypeError, ValueError):
                raise ShapeError("vertices", "must be a list of [x, y] pairs") from None
            if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3 or not np.all(np.isfinite(v)):
                raise ShapeError("vertices", "must be at least 3 finite [x, y] pairs")
            return Polygon(v)
        if kind == "support_grid":
            try:
                h = np.asarray(d.get("h"), dtype=float)
                f = None if d.get("f") is None else np.asarray(d["f"], dtype=float)
            except (TypeError, ValueError):
                raise ShapeError("h", "must be a list of numbers") from None
            if h.ndim != 1:
                raise ShapeError("h", "must be a list of numbers")
            if "n" in d and d["n"] != len(h):
                raise ShapeError("n", f"is {d['n']} but h has {len(h)} entries")
            return SupportGrid(h, f)
    except GeometryError as exc:
        raise ShapeError("vertices" if kind == "polygon" else "h" if kind == "support_grid"
                         else "kind", str(exc)) from None
    raise ShapeError("kind", "must be one of disk, ellipse, polygon, support_grid")


def serialize(body):
    return json.dumps(body.to_dict())


_LITERAL = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def _literal(text):
    m = _LITERAL.match(text)
    if not m:
        raise ShapeError("shape", f"cannot parse {text!r}")
    name, body = m.group(1), m.group(2)
    try:
        args = [float(a) for a in body.split(",")] if body and body.strip() else []
    except ValueError:
        raise ShapeError("shape", f"non-numeric argument in {text!r}") from None
    if name == "disk":
        if len(args) not in (0, 1, 3):
            raise ShapeError("disk", "takes (r) or (r, cx, cy)")
        r = args[0] if args else 1.0
        return {"kind": "disk", "radius": r, "center": args[1:3] or [0.0, 0.0]}
    if name == "ellipse":
        if len(args) not in (2, 4, 5):
            raise ShapeError("ellipse", "takes (a, b), (a, b, cx, cy) or (a, b, cx, cy, rot)")
        return {"kind": "ellipse", "a": args[0], "b": args[1],
                "center": args[2:4] or [0.0, 0.0], "rotation": args[4] if len(args) == 5 else 0.0}
    if name == "square":
        if len(args) > 1:
            raise ShapeError("square", "takes an optional half-side")
        s = args[0] if args else 1.0
        return {"kind": "polygon", "vertices": [[-s, -s], [s, -s], [s, s], [-s, s]]}
    if name == "polygon":
        if len(args) < 6 or len(args) % 2:
            raise ShapeError("vertices", "polygon(...) needs an even number (>= 6) of coordinates")
        return {"kind": "polygon", "vertices": [args[i:i + 2] for i in range(0, len(args), 2)]}
    if name == "support_grid":
        if len(args) not in (1, 2) or args[0] != int(args[0]):
            raise ShapeError("n", "support_grid takes (n) or (n, radius) with integer n")
        n, r = int(args[0]), (args[1] if len(args) == 2 else 1.0)
        if r <= 0:
            raise ShapeError("radius", "must be positive")
        return {"kind": "support_grid", "n": n, "h": [r] * n, "f": [r] * n}
    raise ShapeError("kind", f"unknown shape {name!r}")


def parse_shape(source, role="G"):
    """Body from a JSON file path, inline JSON or a literal such as ``ellipse(2,1)``.

    The K role additionally requires the origin to be interior.
    """
    if source is None:
        raise ShapeError(role, "is required")
    text = source.strip()
    if os.path.isfile(text):
        try:
            with open(text) as fh:
                d = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ShapeError(role, f"unreadable shape file {text!r} ({exc})") from None
    elif text.startswith("{"):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ShapeError(role, f"invalid JSON ({exc.msg})") from None
    else:
        d = _literal(text)
    body = from_dict(d)
    if role == "K":
        try:
            body.require_origin_interior()
        except GeometryError:
            raise ShapeError("K", "origin must lie in the interior of K") from None
    return body


def _curved(body, radius):
    """Smooth a polygon when ``--smooth`` is given; otherwise curvature checks refuse it."""
    if isinstance(body, Polygon) and radius is not None:
        return smooth(body, radius)
    return body


# --- output ----------------------------------------------------------------


def _fmt(v):
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def emit(text, out_path):
    if out_path:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def check_rows(checks):
    """Rows ``check_name, residual, tolerance, pass`` for ``(name, value, tol, ok)``."""
    return write_csv(["check_name", "residual", "tolerance", "pass"], checks)


# --- SVG report ---------------------------------------------------------------


def _color(t):
    # blue (low) to red (high)
    t = min(max(t, 0.0), 1.0)
    return "#%02x%02x%02x" % (int(40 + 215 * t), int(80 + 40 * (1 - abs(2 * t - 1))), int(255 - 215 * t))


def svg_report(G, K, profiles, title=""):
    """Self-contained 800x600 SVG: bodies with sampled densities, and delta vs arc length."""
    w, h = 800, 600
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
           f'viewBox="0 0 {w} {h}">',
           '<rect width="800" height="600" fill="white"/>',
           f'<text x="20" y="28" font-family="sans-serif" font-size="16">{title}</text>']
    gpoly = G.polygon()
    deltas = np.concatenate([p.deltas for p in profiles])
    lo, hi = float(deltas.min()), float(deltas.max())
    span = hi - lo if hi - lo > 1e-12 else 1.0
    last = profiles[-1]
    worst_point = last.samples[int(np.argmin(last.deltas))][0]
    overlay = worst_point.x + last.r * K.polygon()

    pts = np.vstack([gpoly, overlay])
    lo_xy, hi_xy = pts.min(axis=0), pts.max(axis=0)
    scale = 340.0 / max(float(np.max(hi_xy - lo_xy)), 1e-12)
    mid = 0.5 * (lo_xy + hi_xy)

    def tx(p):
        p = np.atleast_2d(p)
        return np.column_stack([200 + (p[:, 0] - mid[0]) * scale, 320 - (p[:, 1] - mid[1]) * scale])

    def path(poly, **attrs):
        q = tx(poly)
        d = " ".join(f"{x:.2f},{y:.2f}" for x, y in q)
        extra = " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in attrs.items())
        return f'<polygon points="{d}" {extra}/>'

    out.append(path(gpoly, fill="#eeeeee", stroke="black", stroke_width="1.5"))
    out.append(path(overlay, fill="none", stroke="#d62728", stroke_dasharray="4,3"))
    for p, d in last.samples:
        x, y = tx(p.x)[0]
        out.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{_color((d - lo) / span)}"/>')
    out.append(f'<text x="20" y="580" font-family="sans-serif" font-size="12">'
               f'points coloured by delta at r={last.r:.4g}; dashed: x+rK at the minimum</text>')

    # delta vs arc length
    x0, y0, pw, ph = 450, 80, 320, 420
    out.append(f'<rect x="{x0}" y="{y0}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    smax = max(max(p.s for p, _ in prof.samples) for prof in profiles) or 1.0
    pad = 0.05 * span
    for i, prof in enumerate(profiles):
        s = np.array([p.s for p, _ in prof.samples])
        d = prof.deltas
        xs = x0 + pw * s / smax
        ys = y0 + ph * (1 - (d - lo + pad) / (span + 2 * pad))
        line = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(xs, ys))
        col = _color(i / max(len(profiles) - 1, 1))
        out.append(f'<polyline points="{line}" fill="none" stroke="{col}" stroke-width="1.5"/>')
        out.append(f'<text x="{x0 + 5}" y="{y0 + ph + 40 + 14 * i}" font-family="sans-serif" '
                   f'font-size="12" fill="{col}">r={prof.r:.4g}  variation={prof.relative_variation:.3g}</text>')
    for val in (lo, hi):
        y = y0 + ph * (1 - (val - lo + pad) / (span + 2 * pad))
        out.append(f'<text x="{x0 - 5}" y="{y + 4:.2f}" font-family="sans-serif" font-size="11" '
                   f'text-anchor="end">{val:.4g}</text>')
    out.append(f'<text x="{x0 + pw / 2}" y="{y0 + ph + 18}" font-family="sans-serif" font-size="12" '
               f'text-anchor="middle">arc length</text>')
    out.append(f'<text x="{x0}" y="{y0 - 10}" font-family="sans-serif" font-size="12">delta</text>')
    out.append("</svg>\n")
    return "\n".join(out)


# --- commands -----------------------------------------------------------------


def _bodies(cfg, need_g=True):
    G = parse_shape(cfg.g, "G") if need_g else None
    K = parse_shape(cfg.k, "K")
    return G, K


def _r_grid(cfg, G, K):
    return cfg.r_grid if cfg.r_grid else default_r_grid(G, K)


def _profile_rows(profiles):
    rows = []
    for prof in profiles:
        rows.extend(prof.rows())
    return rows


def cmd_density_sweep(cfg):
    G, K = _bodies(cfg)
    r_grid = _r_grid(cfg, G, K)
    points = boundary_sample(G, cfg.n_samples)
    profiles = [density_profile(G, K, r, cfg.n_samples, cfg.n_grid, points=points) for r in r_grid]
    if cfg.format == "svg":
        return EXIT_OK, svg_report(G, K, profiles, "density sweep")
    if cfg.format == "json":
        data = [{"r": p.r, "mean": p.mean, "min": p.min, "max": p.max,
                 "relative_variation": p.relative_variation,
                 "samples": [dict(zip(("s", "x", "y", "nu_x", "nu_y", "kappa", "r", "delta"), row))
                             for row in p.rows()]} for p in profiles]
        return EXIT_OK, json.dumps(_jsonable(data), indent=2) + "\n"
    return EXIT_OK, write_csv(["s", "x", "y", "nu_x", "nu_y", "kappa", "r", "delta"],
                              _profile_rows(profiles))


def cmd_check_kdense(cfg):
    G, K = _bodies(cfg)
    tol = cfg.tol if cfg.tol is not None else DEFAULT_TOL
    v = is_kdense(G, K, _r_grid(cfg, G, K), cfg.n_samples, tol, cfg.n_grid)
    status = EXIT_OK if v.is_dense else EXIT_FAIL
    if cfg.format == "svg":
        return status, svg_report(G, K, v.per_r, f"K-density check: max variation {v.max_variation:.3g}")
    rows = [(p.r, p.mean, p.min, p.max, p.relative_variation, p.relative_variation <= tol)
            for p in v.per_r]
    if cfg.format == "json":
        keys = ("r", "mean", "min", "max", "relative_variation", "pass")
        data = {"max_variation": v.max_variation, "tol": tol, "is_dense": v.is_dense,
                "per_r": [dict(zip(keys, row)) for row in rows]}
        return status, json.dumps(_jsonable(data), indent=2) + "\n"
    rows.append(("max_variation", None, None, None, v.max_variation, v.is_dense))
    return status, write_csv(["r", "mean", "min", "max", "relative_variation", "pass"], rows)


def necessary_checks(G, K, tol=1e-4, n=DEFAULT_SAMPLES, smooth_radius=None):
    """The half-volume, centroid, curvature/moment and max-K-distance battery."""
    checks = []
    hv = asymptotics.half_volume_residual(K)
    checks.append(("half_volume", hv, 1e-6, hv <= 1e-6))
    sc = asymptotics.section_centroid_residual(K)
    checks.append(("section_centroid", sc, 1e-8, sc <= 1e-8))
    Gs = _curved(G, smooth_radius)
    res = asymptotics.cond2_residual(Gs, K, n)
    checks.append(("cond2_variation", res.cond2_variation, tol, res.cond2_variation <= tol))
    checks.append(("c_estimate", res.c_estimate, None, res.c_estimate > 0))
    checks.append(("ratio_variation", res.ratio_variation, tol, res.ratio_variation <= tol))
    pts = boundary_sample(G, min(n, 64))
    dist = np.array([max_k_distance(G, K, p.x) for p in pts])
    spread = float((dist.max() - dist.min()) / dist.mean())
    checks.append(("max_k_distance_spread", spread, 1e-6, spread <= 1e-6))
    return checks


def cmd_verify_necessary(cfg):
    G, K = _bodies(cfg)
    tol = cfg.tol if cfg.tol is not None else 1e-4
    checks = necessary_checks(G, K, tol, cfg.n_samples, cfg.smooth)
    return _check_output(cfg, checks)


def _check_output(cfg, checks):
    ok = all(c[3] for c in checks)
    status = EXIT_OK if ok else EXIT_FAIL
    if cfg.format == "json":
        keys = ("check_name", "residual", "tolerance", "pass")
        return status, json.dumps(_jsonable([dict(zip(keys, c)) for c in checks]), indent=2) + "\n"
    return status, check_rows(checks)


def inequality_checks(K, G=None, n=DEFAULT_GRID, tol=1e-6):
    checks = []
    if G is not None:
        gap = inequalities.minkowski_gap(K, G, n)
        checks.append(("mixed_volume", inequalities.mixed_volume(K, G, n), None, True))
        checks.append(("minkowski_gap", gap, -1e-9, gap >= -1e-9))
    lut = inequalities.lutwak_ratio(K, n)
    checks.append(("affine_area", inequalities.affine_area(K, n), None, True))
    checks.append(("lutwak_ratio", lut, 1 + tol, lut <= 1 + tol))
    checks.append(("petty_residual", inequalities.petty_residual(K, n), None, True))
    return checks


def random_suite_checks(seeds, n=DEFAULT_GRID):
    bodies = inequalities.random_bodies(seeds, n)
    checks = []
    m = len(bodies)
    for i, s in enumerate(seeds):
        gap = inequalities.minkowski_gap(bodies[i], bodies[(i + 1) % m], n)
        lut = inequalities.lutwak_ratio(bodies[i], n)
        checks.append((f"minkowski_gap[{s}]", gap, -1e-9, gap >= -1e-9))
        checks.append((f"lutwak_ratio[{s}]", lut, 1 + 1e-6, lut <= 1 + 1e-6))
    return checks


def cmd_verify_inequalities(cfg):
    if cfg.k is None:
        seeds = inequalities.SEEDS if cfg.seed is None else tuple(range(cfg.seed, cfg.seed + 100))
        return _check_output(cfg, random_suite_checks(seeds, cfg.n_grid))
    radius = cfg.smooth
    K = _curved(parse_shape(cfg.k, "K"), radius)
    G = _curved(parse_shape(cfg.g, "G"), radius) if cfg.g else None
    return _check_output(cfg, inequality_checks(K, G, cfg.n_grid))


def cmd_proof_chain(cfg):
    K = _curved(parse_shape(cfg.k, "K"), cfg.smooth)
    tol = cfg.tol if cfg.tol is not None else 1e-4
    rep = inequalities.proof_chain(K, tol, cfg.n_grid)
    status = EXIT_OK if rep.verdict else EXIT_FAIL
    if cfg.format == "json":
        return status, json.dumps(_jsonable(rep.to_dict()), indent=2) + "\n"
    rows = [(k, v) for k, v in rep.to_dict().items() if k != "checks"]
    rows += [(f"check:{k}", v) for k, v in rep.checks.items()]
    return status, write_csv(["field", "value"], rows)


def cmd_report(cfg):
    G, K = _bodies(cfg)
    points = boundary_sample(G, cfg.n_samples)
    profiles = [density_profile(G, K, r, cfg.n_samples, cfg.n_grid, points=points)
                for r in _r_grid(cfg, G, K)]
    if cfg.format == "svg":
        return EXIT_OK, svg_report(G, K, profiles, "K-density report")
    return cmd_density_sweep(cfg)


HANDLERS = {
    "density-sweep": cmd_density_sweep,
    "check-kdense": cmd_check_kdense,
    "verify-necessary": cmd_verify_necessary,
    "verify-inequalities": cmd_verify_inequalities,
    "proof-chain": cmd_proof_chain,
    "report": cmd_report,
}


def run(cfg):
    """Execute a :class:`RunConfig`; returns ``(exit_status, text)``."""
    if cfg.command not in HANDLERS:
        raise ShapeError("command", f"must be one of {', '.join(COMMANDS)}")
    if cfg.tol is not None and not cfg.tol > 0:
        raise ShapeError("tol", "must be positive")
    if cfg.r_grid and any(not r > 0 for r in cfg.r_grid):
        raise ShapeError("r", "entries must be positive")
    if cfg.smooth is not None and not cfg.smooth > 0:
        raise ShapeError("smooth", "must be positive")
    return HANDLERS[cfg.command](cfg)


def _r_list(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("r: expected comma-separated numbers") from None
    if not vals or any(not v > 0 for v in vals):
        raise argparse.ArgumentTypeError("r: entries must be positive")
    return vals


def build_parser():
    parser = argparse.ArgumentParser(prog="kdense", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--g", help="body G: JSON file, inline JSON or literal like ellipse(2,1)")
        p.add_argument("--k", help="body K (origin must be interior)")
        p.add_argument("--r", type=_r_list, help="comma-separated dilation factors")
        p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="boundary samples of G")
        p.add_argument("--grid", type=int, default=DEFAULT_POLY, help="polygonization / grid size")
        p.add_argument("--tol", type=float)
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json", "svg"),
                       default="svg" if name == "report" else "csv")
        p.add_argument("--seed", type=int, help="first seed of the random-body suite")
        p.add_argument("--smooth", type=float, help="polygon smoothing radius")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    need_g = args.command in ("density-sweep", "check-kdense", "verify-necessary", "report")
    need_k = args.command != "verify-inequalities"
    missing = [f for f, need in (("--g", need_g), ("--k", need_k)) if need and not getattr(args, f[2:])]
    if missing:
        print(f"kdense: error: {missing[0]} is required for {args.command}", file=sys.stderr)
        return EXIT_INPUT
    if args.samples < 8 or args.grid < 8:
        print("kdense: error: --samples and --grid must be at least 8", file=sys.stderr)
        return EXIT_INPUT
    cfg = RunConfig(args.command, args.g, args.k, args.r, args.samples, args.grid, args.tol,
                    args.out, args.format, args.seed, args.smooth)
    try:
        status, text = run(cfg)
    except ShapeError as exc:
        print(f"kdense: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GeometryError as exc:
        print(f"kdense: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        emit(text, cfg.out_path)
    except OSError as exc:
        print(f"kdense: error: out: cannot write {cfg.out_path!r} ({exc.strerror})", file=sys.stderr)
        return EXIT_INPUT
    return status


if __name__ == "__main__":
    sys.exit(main())
