"""Density of ``G`` inside translated dilates of ``K`` and related checks."""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import brentq, linprog, minimize_scalar

from . import geometry
from .bodies import (
    DomainError,
    Polygon,
    SupportGrid,
    boundary_sample,
    grid_angles,
    unit,
)

DEFAULT_POLY = 1024
DEFAULT_SAMPLES = 256
DEFAULT_TOL = 1e-3
DEFAULT_R_FACTORS = (0.25, 0.5, 1.0)


@dataclass
class DensityProfile:
    r: float
    samples: list
    mean: float = field(init=False)
    min: float = field(init=False)
    max: float = field(init=False)
    relative_variation: float = field(init=False)

    def __post_init__(self):
        d = self.deltas
        self.mean = float(d.mean())
        self.min = float(d.min())
        self.max = float(d.max())
        self.relative_variation = (self.max - self.min) / self.mean if self.mean > 0 else math.inf

    @property
    def deltas(self):
        return np.array([d for _, d in self.samples])

    def rows(self):
        """CSV rows ``s, x, y, nu_x, nu_y, kappa, r, delta``."""
        for p, d in self.samples:
            yield (p.s, p.x[0], p.x[1], p.nu[0], p.nu[1], p.kappa, self.r, d)


@dataclass
class KDenseVerdict:
    r_grid: list
    per_r: list
    max_variation: float
    is_dense: bool
    tol: float


def _check_r(r):
    if not r > 0:
        raise DomainError(f"dilation factor must be positive, got r={r}")


def delta_from_polygons(g_poly, k_poly, k_area, x, r):
    """``V(G ∩ (x + rK)) / (r^2 V(K))`` for pre-polygonized bodies."""
    ball = np.asarray(x, dtype=float) + r * k_poly
    inter = geometry.intersect_convex_polygons(ball, g_poly)
    d = geometry.polygon_area(inter) / (r * r * k_area)
    return min(max(d, 0.0), 1.0)


def delta(G, K, x, r, n=DEFAULT_POLY):
    """Relative measure of ``G`` inside ``x + rK`` by exact polygon clipping.

    Curved bodies are replaced by area-matched ``n``-gons; polygon inputs
    are used as given.
    """
    _check_r(r)
    K.require_origin_interior()
    return delta_from_polygons(G.polygon(n), K.polygon(n), K.area, x, r)


def delta_monte_carlo(G, K, x, r, samples=200_000, seed=0):
    """Seeded Monte Carlo estimate of :func:`delta` (independent cross-check)."""
    _check_r(r)
    K.require_origin_interior()
    rng = np.random.default_rng(seed)
    lo = np.array([-K.support(np.pi), -K.support(1.5 * np.pi)])
    hi = np.array([K.support(0.0), K.support(0.5 * np.pi)])
    hits = total = 0
    while total < samples:
        z = lo + (hi - lo) * rng.random((samples, 2))
        z = z[K.contains(z, tol=0.0)][: samples - total]
        total += len(z)
        hits += int(np.count_nonzero(G.contains(np.asarray(x) + r * z, tol=0.0)))
    return hits / total


def density_profile(G, K, r, n=DEFAULT_SAMPLES, n_poly=DEFAULT_POLY, points=None):
    """Evaluate :func:`delta` over ``n`` arc-length-uniform boundary samples."""
    _check_r(r)
    if n < 8:
        raise DomainError("density_profile needs n >= 8")
    K.require_origin_interior()
    if points is None:
        points = boundary_sample(G, n)
    g_poly, k_poly, k_area = G.polygon(n_poly), K.polygon(n_poly), K.area
    values = [delta_from_polygons(g_poly, k_poly, k_area, p.x, r) for p in points]
    return DensityProfile(float(r), list(zip(points, values)))


def inradius(G, K, n_dirs=512):
    """Largest ``lam`` such that a translate of ``lam*K`` fits in ``G``."""
    dirs = [grid_angles(n_dirs)]
    for body in (G, K):
        if isinstance(body, Polygon):
            dirs.append(np.arctan2(body.normals[:, 1], body.normals[:, 0]))
    th = np.concatenate(dirs)
    u = unit(th)
    a_ub = np.column_stack([u, K.support(th)])
    res = linprog([0.0, 0.0, -1.0], A_ub=a_ub, b_ub=G.support(th),
                  bounds=[(None, None), (None, None), (0, None)], method="highs")
    if not res.success:
        raise DomainError(f"inradius linear program failed: {res.message}")
    return float(res.x[2])


def default_r_grid(G, K):
    rho = inradius(G, K)
    return [f * rho for f in DEFAULT_R_FACTORS]


def is_kdense(G, K, r_grid=None, n=DEFAULT_SAMPLES, tol=DEFAULT_TOL, n_poly=DEFAULT_POLY):
    """K-density verdict on a finite r-grid and a finite boundary sample."""
    if r_grid is None:
        r_grid = default_r_grid(G, K)
    r_grid = [float(r) for r in r_grid]
    if not r_grid:
        raise DomainError("r_grid must not be empty")
    for r in r_grid:
        _check_r(r)
    points = boundary_sample(G, n)
    per_r = [density_profile(G, K, r, n, n_poly, points=points) for r in r_grid]
    worst = max(p.relative_variation for p in per_r)
    return KDenseVerdict(r_grid, per_r, worst, bool(worst <= tol), tol)


def max_k_distance(G, K, x):
    """``max_{y in G} ||y - x||_K``; attained on the boundary, at a vertex for polygons."""
    K.require_origin_interior()
    x = np.asarray(x, dtype=float)
    if isinstance(G, Polygon):
        return float(np.max(K.gauge(G.vertices - x)))
    if isinstance(G, SupportGrid):
        return float(np.max(K.gauge(G.polygon() - x)))

    def g(t):
        return float(K.gauge(G.point_at(t) - x)[0])

    m = 2048
    ts = 2 * np.pi * np.arange(m) / m
    vals = K.gauge(G.point_at(ts) - x)
    is_peak = (vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1))
    best = float(vals.max())
    step = 2 * np.pi / m
    for i in np.nonzero(is_peak)[0]:
        if vals[i] < best - 1e-3 * max(best, 1.0):
            continue
        res = minimize_scalar(lambda t: -g(t), bounds=(ts[i] - step, ts[i] + step),
                              method="bounded", options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


class StepMeasure:
    """Measure on ``[0, inf)``: point masses plus piecewise-constant densities.

    ``atoms`` is a list of ``(t, weight)``; ``pieces`` a list of
    ``(start, stop, density)``.  ``phi(t) = mu([0, t))``.
    """

    def __init__(self, atoms=(), pieces=()):
        self.atoms = [(float(t), float(w)) for t, w in atoms]
        self.pieces = [(float(a), float(b), float(c)) for a, b, c in pieces]
        for t, w in self.atoms:
            if t < 0 or w < 0:
                raise DomainError("atoms need t >= 0 and non-negative weight")
        for a, b, c in self.pieces:
            if not (0 <= a < b) or c < 0:
                raise DomainError("pieces need 0 <= start < stop and density >= 0")

    @classmethod
    def dirac(cls, r):
        return cls(atoms=[(r, 1.0)])

    @property
    def breaks(self):
        pts = {t for t, _ in self.atoms}
        for a, b, _ in self.pieces:
            pts.update((a, b))
        return sorted(pts)

    def phi(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for s, w in self.atoms:
            out = out + w * (t > s)
        for a, b, c in self.pieces:
            out = out + c * np.clip(t - a, 0.0, b - a)
        return out

    __call__ = phi


def _corner_angles(body, x):
    if isinstance(body, Polygon):
        verts = body.vertices
    elif isinstance(body, SupportGrid):
        verts = body.corner_points()
    else:
        return np.zeros(0)
    d = verts - np.asarray(x, dtype=float)
    d = d[np.hypot(d[:, 0], d[:, 1]) > 1e-12]
    return np.arctan2(d[:, 1], d[:, 0])


def _angular_breaks(G, K, x, breaks, m=4096):
    """Angles where the polar integrand centred at ``x`` is not smooth."""
    psi = grid_angles(m)

    def exit_minus(b):
        def fun(a):
            a = np.atleast_1d(a)
            return G.ray_interval(x, unit(a))[1] - b * K.radial(a)
        return fun

    def chord(a):
        t0, t1 = G.ray_interval(x, unit(np.atleast_1d(a)))
        return t1 - t0

    out = [np.mod(_corner_angles(G, x), 2 * np.pi), np.mod(_corner_angles(K, (0.0, 0.0)), 2 * np.pi)]
    t0, t1 = G.ray_interval(x, unit(psi))
    scale = max(float(np.max(t1)), 1e-300)
    inside = (t1 - t0) > 1e-12 * scale
    for i in np.nonzero(inside != np.roll(inside, -1))[0]:
        lo, hi = psi[i], psi[i] + 2 * np.pi / m
        want = inside[i]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if (chord(mid)[0] > 1e-12 * scale) == want:
                lo = mid
            else:
                hi = mid
        out.append([0.5 * (lo + hi)])
    rho = K.radial(psi)
    for b in breaks:
        g = t1 - b * rho
        for i in np.nonzero(np.sign(g) != np.sign(np.roll(g, -1)))[0]:
            lo, hi = psi[i], psi[i] + 2 * np.pi / m
            fun = exit_minus(b)
            if np.sign(fun(lo)[0]) == np.sign(fun(hi)[0]):
                continue
            out.append([brentq(lambda a: fun(a)[0], lo, hi, xtol=1e-15)])
    pts = np.unique(np.mod(np.concatenate([np.ravel(o) for o in out]), 2 * np.pi))
    return pts


def _angular_rule(cuts, n_angles):
    """Gauss-Legendre nodes/weights on each arc between sorted cut angles."""
    if len(cuts) == 0:
        cuts = np.zeros(1)
    ends = np.concatenate([cuts[1:], [cuts[0] + 2 * np.pi]])
    nodes, weights = [], []
    for a, b in zip(cuts, ends):
        if b - a <= 1e-14:
            continue
        m = max(6, int(math.ceil(n_angles * (b - a) / (2 * np.pi))))
        z, w = np.polynomial.legendre.leggauss(m)
        half = 0.5 * (b - a)
        nodes.append(a + half * (z + 1))
        weights.append(half * w)
    return np.concatenate(nodes), np.concatenate(weights)


def f_phi(G, K, x, phi, n_angles=2048, n_radial=1024, breaks=None):
    """``∫_G phi(||y - x||_K) dy`` by polar quadrature centred at ``x``.

    The angular range is split where the integrand has kinks (polygon
    corners, tangent rays, crossings of ``x + bK`` for each gauge break
    ``b`` of ``phi``) and each arc gets its own Gauss-Legendre rule; rays
    use Gauss-Legendre between the breaks.  Breaks of a
    :class:`StepMeasure` are picked up automatically.
    """
    K.require_origin_interior()
    x = np.asarray(x, dtype=float)
    if breaks is None and isinstance(phi, StepMeasure):
        breaks = phi.breaks
    breaks = sorted(b for b in (breaks or []) if b > 0)
    psi, psi_w = _angular_rule(_angular_breaks(G, K, x, breaks), n_angles)
    t0, t1 = G.ray_interval(x, unit(psi))
    rho = K.radial(psi)
    cuts = [t0] + [np.clip(b * rho, t0, t1) for b in breaks] + [t1]
    nodes, weights = np.polynomial.legendre.leggauss(n_radial)
    total = np.zeros(len(psi))
    lowest = float(np.asarray(phi(np.zeros(1)), dtype=float).ravel()[0])
    if lowest < 0:
        raise DomainError("phi(0) must be non-negative")
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        half = 0.5 * (hi - lo)
        t = (lo + half)[:, None] + half[:, None] * nodes[None, :]
        arg = t / rho[:, None]
        vals = np.asarray(phi(arg), dtype=float)
        order = np.argsort(arg.ravel(), kind="stable")
        sv = vals.ravel()[order]
        if sv[0] < lowest - 1e-12 or np.any(np.diff(sv) < -1e-12 * max(1.0, float(np.max(np.abs(sv))))):
            raise DomainError("phi must be non-decreasing")
        total += half * np.sum(weights[None, :] * vals * t, axis=1)
    return float(np.dot(total, psi_w))


def excess_volume(G, K, x, r, n=DEFAULT_POLY):
    """``V(G minus B_K(x, r)) = V(G) - r^2 V(K) delta``."""
    if r <= 0:
        return G.area
    return G.area - r * r * K.area * delta(G, K, x, r, n)


def inner_reach(G, K, x, m=4096):
    """Largest ``t`` with ``x + tK`` inside ``G`` (0 when ``x`` is on or outside the boundary)."""
    x = np.asarray(x, dtype=float)
    th = grid_angles(m)

    def slack(t):
        t = np.atleast_1d(t)
        return (G.support(t) - unit(t) @ x) / K.support(t)

    vals = slack(th)
    i = int(np.argmin(vals))
    step = 2 * np.pi / m
    res = minimize_scalar(lambda t: float(slack(t)[0]), bounds=(th[i] - step, th[i] + step),
                          method="bounded", options={"xatol": 1e-12})
    return max(0.0, min(float(vals[i]), float(res.fun)))


def _radius_breaks(G, K, x, reach):
    """Radii where ``t -> V(G ∩ (x + tK))`` may have a kink."""
    x = np.asarray(x, dtype=float)
    out = [inner_reach(G, K, x), reach]
    if isinstance(G, Polygon):
        out.extend(K.gauge(G.vertices - x))
    if isinstance(K, Polygon):
        v = K.vertices
        length = np.hypot(v[:, 0], v[:, 1])
        _, t1 = G.ray_interval(x, v / length[:, None])
        out.extend(t1 / length)
    return sorted({float(t) for t in out if 0 < t <= reach})


def layer_cake(G, K, x, measure, n=DEFAULT_POLY, n_quad=32):
    """Layer-cake form ``∫ V(G minus B_K(x, t)) dmu(t)`` for a :class:`StepMeasure`.

    Continuous pieces are integrated by Gauss-Legendre between the radii
    where the excess volume has kinks.
    """
    K.require_origin_interior()
    g_poly, k_poly, k_area, g_area = G.polygon(n), K.polygon(n), K.area, G.area
    reach = max_k_distance(G, K, x)

    def excess(t):
        if t <= 0:
            return g_area
        if t >= reach:
            return 0.0
        return g_area - t * t * k_area * delta_from_polygons(g_poly, k_poly, k_area, x, t)

    total = sum(w * excess(t) for t, w in measure.atoms)
    nodes, weights = np.polynomial.legendre.leggauss(n_quad)
    kinks = _radius_breaks(G, K, x, reach) if measure.pieces else []
    for a, b, c in measure.pieces:
        stops = [a] + [t for t in kinks if a < t < min(b, reach)] + [min(b, reach)]
        for lo, hi in zip(stops[:-1], stops[1:]):
            if hi <= lo:
                continue
            half = 0.5 * (hi - lo)
            ts = lo + half * (nodes + 1)
            total += c * half * sum(wt * excess(t) for wt, t in zip(weights, ts))
    return float(total)
