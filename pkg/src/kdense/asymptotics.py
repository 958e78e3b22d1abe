"""Small-r expansion of the density and the necessary conditions it implies.

As ``r -> 0+``, ``delta(x, r) = delta0(x) - delta1(x) r + o(r)``, where
``delta0`` is the half-plane share of ``K`` and ``delta1`` couples the
curvature of ``G`` at ``x`` with the second moment of a central chord of ``K``.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import geometry
from .bodies import (
    CurvatureUndefinedError,
    Ellipse,
    Polygon,
    angle_of,
    boundary_sample,
    grid_angles,
    perp_angle,
    unit,
)
from .density import DEFAULT_POLY, delta, delta_from_polygons

DEFAULT_DIRS = 256
RICHARDSON_TOL = 1e-4


@dataclass
class ExpansionAtPoint:
    x: object
    delta0: float
    delta1: float
    r_fit: list = field(default_factory=list)
    delta1_extrapolated: float = math.nan
    converged: bool = False


@dataclass
class ConditionResiduals:
    half_volume: float
    centroid: float
    cond2_variation: float
    c_estimate: float
    ratio_variation: float = math.nan
    ratio_c_estimate: float = math.nan
    n_samples: int = 0
    n_excluded: int = 0


def delta0(K, d, n=DEFAULT_POLY):
    """``V(K ∩ {<y, u> >= 0}) / V(K)``: closed form for ellipses, clipping otherwise."""
    th = angle_of(d)
    if isinstance(K, Ellipse):
        return float(K.half_plane_fraction(th))
    poly = K.polygon(n)
    u = unit(th)
    part = geometry.clip_halfplane(poly, -u, 0.0)
    return geometry.polygon_area(part) / geometry.polygon_area(poly)


def half_volume_residual(K, n_dirs=DEFAULT_DIRS):
    """Max over a direction grid of ``|delta0(K, u) - 1/2|`` (a lower bound on the sup)."""
    if n_dirs < 16:
        raise ValueError("half_volume_residual needs n_dirs >= 16")
    return max(abs(delta0(K, t) - 0.5) for t in grid_angles(n_dirs))


def section_centroid(K, d):
    """First moment ``∫ <y, u_perp>`` over the central chord of ``K`` orthogonal to ``u``."""
    K.require_origin_interior()
    t = perp_angle(angle_of(d))
    plus, minus = K.radial(np.array([t, t + np.pi]))
    return 0.5 * (plus ** 2 - minus ** 2)


def section_centroid_residual(K, n_dirs=DEFAULT_DIRS):
    return float(max(abs(section_centroid(K, t)) for t in grid_angles(n_dirs)))


def chord(K, d):
    """Lengths ``(t_minus, t_plus)`` of the chord ``K ∩ span(u_perp)`` on either side of 0."""
    t = float(perp_angle(angle_of(d)))
    w = unit(np.array([t, t + np.pi]))
    _, ends = K.ray_interval((0.0, 0.0), w)
    return float(ends[1]), float(ends[0])


def moment_m(K, d):
    """Second moment ``∫ <xi, u_perp>^2`` over the central chord orthogonal to ``u``.

    Uses the chord endpoints directly, so it holds for non-symmetric ``K``.
    """
    K.require_origin_interior()
    minus, plus = chord(K, d)
    return (plus ** 3 + minus ** 3) / 3.0


def moment_m_symmetric(K, d):
    """Shortcut ``(2/3) rho_K(u_perp)^3``, valid for centrally symmetric ``K``."""
    K.require_origin_interior()
    return 2.0 / 3.0 * float(np.ravel(K.radial(perp_angle(angle_of(d))))[0]) ** 3


def _require_curvature(G, x):
    if isinstance(G, Polygon) or getattr(x, "vertex", False) or not np.isfinite(x.kappa):
        raise CurvatureUndefinedError(
            "curvature of G is undefined here; smooth the polygon or drop vertex samples"
        )


def delta1(G, K, x):
    """Plug-in first-order coefficient ``m(nu) kappa / (2 V(K))`` at a boundary point."""
    _require_curvature(G, x)
    th = math.atan2(x.nu[1], x.nu[0])
    return moment_m(K, th) * x.kappa / (2.0 * K.area)


def richardson_slope(G, K, x, r0=0.2, levels=6, n=4096, tol=RICHARDSON_TOL):
    """Finite-r estimate of ``delta1`` by Richardson extrapolation.

    Forms ``s(r) = (delta0 - delta(r)) / r`` on ``r0, r0/2, ...`` and
    eliminates the linear term; stops when successive extrapolants agree to
    ``tol``.  Returns ``(estimate, r_fit, converged)``.
    """
    th = math.atan2(x.nu[1], x.nu[0])
    d0 = delta0(K, th)
    g_poly, k_poly = G.polygon(n), K.polygon(n)
    r_fit, slopes, extrap = [], [], []
    r = r0
    for _ in range(levels):
        d = delta_from_polygons(g_poly, k_poly, K.area, x.x, r)
        r_fit.append((r, d))
        slopes.append((d0 - d) / r)
        if len(slopes) >= 2:
            extrap.append(2 * slopes[-1] - slopes[-2])
            if len(extrap) >= 2 and abs(extrap[-1] - extrap[-2]) < tol:
                return extrap[-1], r_fit, True
        r /= 2
    best = extrap[-1] if extrap else slopes[-1]
    return best, r_fit, False


def expansion_at(G, K, x, r0=0.2, levels=6, n=4096):
    th = math.atan2(x.nu[1], x.nu[0])
    d1 = delta1(G, K, x)
    est, r_fit, ok = richardson_slope(G, K, x, r0, levels, n)
    return ExpansionAtPoint(x, delta0(K, th), d1, r_fit, est, ok)


def taylor_remainder(G, K, x, r, n=4096):
    """``delta(x, r) - delta0 + delta1 r`` (should be ``o(r)``)."""
    th = math.atan2(x.nu[1], x.nu[0])
    return delta(G, K, x.x, r, n) - delta0(K, th) + delta1(G, K, x) * r


def _variation(values):
    values = np.asarray(values, dtype=float)
    mean = float(values.mean())
    if not np.all(np.isfinite(values)) or mean <= 0:
        return math.inf, mean
    return float((values.max() - values.min()) / mean), mean


def cond2_residual(G, K, n=DEFAULT_DIRS, n_dirs=DEFAULT_DIRS):
    """Residuals of the half-volume, section-centroid and curvature/moment conditions.

    ``cond2_variation`` is the relative spread of ``m(nu) kappa`` over
    ``n`` boundary samples of ``G``; ``c_estimate`` is its mean over
    ``V(K)``.  The ratio form ``rho_K(u_perp)^3 / (V(K) f_G(u))`` is also
    evaluated on ``n_dirs`` outward normals.  Polygon vertices are skipped.
    """
    if isinstance(G, Polygon):
        raise CurvatureUndefinedError(
            "cond2 needs the curvature of G; smooth the polygon first"
        )
    K.require_origin_interior()
    pts = boundary_sample(G, n)
    usable = [p for p in pts if not p.vertex and np.isfinite(p.kappa)]
    products = [moment_m(K, math.atan2(p.nu[1], p.nu[0])) * p.kappa for p in usable]
    var, mean = _variation(products)
    vk = K.area
    th = grid_angles(n_dirs)
    f_g = G.curvature_function(th)
    rho = K.radial(perp_angle(th))
    with np.errstate(divide="ignore"):
        ratio = rho ** 3 / (vk * f_g)
    rvar, rmean = _variation(ratio)
    return ConditionResiduals(
        half_volume=float(half_volume_residual(K, n_dirs)),
        centroid=section_centroid_residual(K, n_dirs),
        cond2_variation=var,
        c_estimate=mean / vk,
        ratio_variation=rvar,
        ratio_c_estimate=rmean,
        n_samples=len(usable),
        n_excluded=len(pts) - len(usable),
    )
