"""Planar convex bodies and their elementary functionals.

Four representations share one interface: :class:`Disk`, :class:`Ellipse`,
:class:`Polygon` and :class:`SupportGrid`.  Angles are outward-normal angles
in radians; vectorised methods accept scalars or arrays.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import geometry
from .geometry import as_points

DEFAULT_GRID = 1024
MIN_AREA = 1e-12

# u_perp is u rotated clockwise by 90 degrees; every caller goes through perp().
PERP_ROTATION = -0.5 * np.pi


class GeometryError(ValueError):
    pass


class PreconditionError(GeometryError):
    pass


class DegenerateBodyError(GeometryError):
    pass


class CurvatureUndefinedError(GeometryError):
    pass


class NonConvexGridError(GeometryError):
    pass


class DomainError(GeometryError):
    pass


def perp(u):
    """Clockwise quarter turn: ``(cos t, sin t) -> (sin t, -cos t)``."""
    u = np.asarray(u, dtype=float)
    return np.stack([u[..., 1], -u[..., 0]], axis=-1)


def perp_angle(theta):
    return np.asarray(theta, dtype=float) + PERP_ROTATION


def unit(theta):
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


@dataclass(frozen=True)
class Direction:
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % (2 * np.pi))

    @property
    def u(self):
        return unit(self.theta)

    @property
    def perp(self):
        return Direction(float(perp_angle(self.theta)))

    @classmethod
    def from_vector(cls, v):
        return cls(math.atan2(v[1], v[0]))


def angle_of(d):
    """Accept a :class:`Direction`, an angle (or array of angles), or a 2-vector."""
    if isinstance(d, Direction):
        return d.theta
    a = np.asarray(d, dtype=float)
    if a.shape == (2,):
        return math.atan2(a[1], a[0])
    return a


def _angles(theta):
    """Angle or array of angles (a :class:`Direction` is also accepted)."""
    if isinstance(theta, Direction):
        return theta.theta
    return np.asarray(theta, dtype=float)


def grid_angles(n):
    return 2 * np.pi * np.arange(n) / n


def _area_match_factor(dtheta):
    # regular n-gon with circumradius R*sqrt(dt/sin dt) has the disk's area
    return math.sqrt(dtheta / math.sin(dtheta)) - 1.0


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of the boundary with inward unit normal and curvature.

    ``theta`` is the outward-normal angle; ``kappa`` is ``inf`` at polygon
    vertices, where ``vertex`` is set and the normal is the cone bisector.
    """

    x: np.ndarray
    nu: np.ndarray
    kappa: float
    s: float
    theta: float
    vertex: bool = False

    @property
    def tangent(self):
        return perp(self.nu)


def _cyrus_beck(normals, offsets, origin, dirs):
    """Parameter interval of rays ``origin + t*dir, t >= 0`` inside ``N y <= b``."""
    dirs = as_points(dirs)
    origin = np.asarray(origin, dtype=float)
    denom = dirs @ normals.T
    slack = offsets - normals @ origin
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = slack[None, :] / denom
    upper = np.where(denom > 0, ratio, np.inf).min(axis=1)
    lower = np.where(denom < 0, ratio, -np.inf).max(axis=1)
    blocked = np.any((denom == 0) & (slack[None, :] < 0), axis=1)
    lower = np.maximum(lower, 0.0)
    upper = np.where(blocked | (upper < lower), lower, upper)
    return lower, upper


class ConvexBody:
    """Shared behaviour; subclasses supply the representation-specific parts."""

    kind = "body"

    def support(self, theta):
        raise NotImplementedError

    def boundary_point(self, theta):
        raise NotImplementedError

    def curvature_function(self, theta):
        raise NotImplementedError

    def contains(self, points, tol=1e-12):
        raise NotImplementedError

    @property
    def area(self):
        raise NotImplementedError

    def polygon(self, n=DEFAULT_GRID):
        raise NotImplementedError

    def translate(self, v):
        raise NotImplementedError

    def linear(self, a):
        raise NotImplementedError

    def reflect(self):
        raise NotImplementedError

    def polar(self):
        raise NotImplementedError

    def to_grid(self, n=DEFAULT_GRID):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def _boundary_arrays(self, n):
        raise NotImplementedError

    def gauge(self, points):
        raise NotImplementedError

    # generic parts

    def scale(self, lam):
        return self.linear(lam * np.eye(2))

    def rotate(self, angle):
        c, s = math.cos(angle), math.sin(angle)
        return self.linear(np.array([[c, -s], [s, c]]))

    def radial(self, theta):
        u = unit(theta)
        return 1.0 / self.gauge(u)

    def ray_interval(self, origin, dirs):
        poly = self.polygon()
        n, b = geometry.edge_normals(poly)
        return _cyrus_beck(n, b, origin, dirs)

    def origin_margin(self, n=256):
        """Minimum support value over a direction grid (> 0 iff origin interior)."""
        return float(np.min(self.support(grid_angles(n))))

    def require_origin_interior(self):
        m = self.origin_margin()
        if not m > 1e-12 * max(self.diameter, 1.0):
            raise PreconditionError(
                f"origin is not interior to the {self.kind} (min support {m:.3g})"
            )

    @property
    def diameter(self):
        th = grid_angles(512)
        return float(np.max(self.support(th) + self.support(th + np.pi)))

    def is_centrally_symmetric(self, n=512, rtol=1e-9):
        th = grid_angles(n)
        h = self.support(th)
        return bool(np.max(np.abs(h - self.support(th + np.pi))) <= rtol * np.max(np.abs(h)))


class Ellipse(ConvexBody):
    """``{c + R diag(a, b) w : |w| <= 1}`` with ``R`` the rotation by ``rotation``."""

    kind = "ellipse"

    def __init__(self, a, b, center=(0.0, 0.0), rotation=0.0):
        a, b = float(a), float(b)
        if not (a > 0 and b > 0) or math.pi * a * b < MIN_AREA:
            raise DegenerateBodyError(f"ellipse semi-axes must be positive, got a={a}, b={b}")
        self.a, self.b = a, b
        self.center = np.array(center, dtype=float).reshape(2)
        self.rotation = float(rotation)
        c, s = math.cos(self.rotation), math.sin(self.rotation)
        self.R = np.array([[c, -s], [s, c]])
        self.M = self.R @ np.diag([a, b])
        self.Minv = np.diag([1 / a, 1 / b]) @ self.R.T

    def __repr__(self):
        return (f"Ellipse(a={self.a!r}, b={self.b!r}, center={tuple(self.center)!r}, "
                f"rotation={self.rotation!r})")

    @classmethod
    def from_shape_matrix(cls, A, center=(0.0, 0.0)):
        """Ellipse ``{y : (y - c)^T A (y - c) <= 1}`` for symmetric positive definite ``A``."""
        lam, vec = np.linalg.eigh(np.asarray(A, dtype=float))
        if lam[0] <= 0:
            raise DegenerateBodyError("shape matrix is not positive definite")
        a, b = 1 / math.sqrt(lam[0]), 1 / math.sqrt(lam[1])
        rot = math.atan2(vec[1, 0], vec[0, 0])
        return cls(a, b, center, rot)

    def _centered_support(self, u):
        return np.linalg.norm(u @ self.M, axis=-1)

    def support(self, theta):
        u = unit(_angles(theta))
        return u @ self.center + self._centered_support(u)

    def boundary_point(self, theta):
        u = unit(_angles(theta))
        w = u @ self.M
        w = w / np.linalg.norm(w, axis=-1, keepdims=True)
        return self.center + w @ self.M.T

    def curvature_function(self, theta):
        u = unit(_angles(theta))
        return (self.a * self.b) ** 2 / self._centered_support(u) ** 3

    def contains(self, points, tol=1e-12):
        q = (as_points(points) - self.center) @ self.Minv.T
        return np.einsum("ij,ij->i", q, q) <= 1 + tol

    @property
    def area(self):
        return math.pi * self.a * self.b

    def gauge(self, points):
        q = as_points(points) @ self.Minv.T
        e = self.Minv @ self.center
        ee = float(e @ e)
        if ee >= 1.0:
            raise PreconditionError("origin is not interior to the ellipse")
        qe = q @ e
        qq = np.einsum("ij,ij->i", q, q)
        return (-qe + np.sqrt(qe ** 2 + (1 - ee) * qq)) / (1 - ee)

    def origin_margin(self, n=256):
        e = self.Minv @ self.center
        return float(1.0 - math.sqrt(e @ e)) * min(self.a, self.b)

    def ray_interval(self, origin, dirs):
        dirs = as_points(dirs)
        q = self.Minv @ (np.asarray(origin, dtype=float) - self.center)
        d = dirs @ self.Minv.T
        aa = np.einsum("ij,ij->i", d, d)
        bb = d @ q
        cc = float(q @ q) - 1.0
        disc = bb ** 2 - aa * cc
        root = np.sqrt(np.maximum(disc, 0.0))
        t0 = np.maximum((-bb - root) / aa, 0.0)
        t1 = np.maximum((-bb + root) / aa, 0.0)
        t1 = np.where(disc > 0, np.maximum(t1, t0), t0)
        return t0, t1

    def half_plane_fraction(self, theta):
        """Fraction of the area in ``{<y, u> >= 0}``, in closed form."""
        u = unit(_angles(theta))
        d = -(u @ self.center) / self._centered_support(u)
        d = np.clip(d, -1.0, 1.0)
        return (np.arccos(d) - d * np.sqrt(1 - d * d)) / math.pi

    def point_at(self, t):
        t = np.asarray(t, dtype=float)
        return self.center + np.stack([np.cos(t), np.sin(t)], axis=-1) @ self.M.T

    def polygon(self, n=DEFAULT_GRID):
        th = grid_angles(n)
        f = self.curvature_function(th)
        return self.boundary_point(th) + (f * _area_match_factor(2 * math.pi / n))[:, None] * unit(th)

    def translate(self, v):
        return Ellipse(self.a, self.b, self.center + np.asarray(v, dtype=float), self.rotation)

    def linear(self, a):
        a = np.asarray(a, dtype=float)
        m = a @ self.M
        return Ellipse.from_shape_matrix(np.linalg.inv(m @ m.T), a @ self.center)

    def reflect(self):
        return Ellipse(self.a, self.b, -self.center, self.rotation)

    def polar(self):
        self.require_origin_interior()
        s = self.M @ self.M.T
        c = self.center
        q = s - np.outer(c, c)
        qc = np.linalg.solve(q, c)
        k = 1.0 + c @ qc
        return Ellipse.from_shape_matrix(q / k, -qc)

    def to_grid(self, n=DEFAULT_GRID):
        th = grid_angles(n)
        return SupportGrid(self.support(th), self.curvature_function(th))

    def to_dict(self):
        return {"kind": "ellipse", "a": self.a, "b": self.b,
                "center": [float(self.center[0]), float(self.center[1])],
                "rotation": self.rotation}

    def _arclength_table(self, m):
        t = 2 * np.pi * np.arange(m + 1) / m
        speed = np.hypot(self.a * np.sin(t), self.b * np.cos(t))
        s = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * (2 * np.pi / m))])
        return t, s

    def _boundary_arrays(self, n):
        t_tab, s_tab = self._arclength_table(max(64 * n, 1 << 15))
        perim = s_tab[-1]
        s = perim * np.arange(n) / n
        t = np.interp(s, s_tab, t_tab)
        x = self.point_at(t)
        w = np.stack([np.cos(t), np.sin(t)], axis=-1) @ self.Minv
        out = w / np.linalg.norm(w, axis=1, keepdims=True)
        kappa = self.a * self.b / ((self.a * np.sin(t)) ** 2 + (self.b * np.cos(t)) ** 2) ** 1.5
        theta = np.mod(np.arctan2(out[:, 1], out[:, 0]), 2 * np.pi)
        return x, -out, kappa, s, theta, np.zeros(n, dtype=bool)


class Disk(Ellipse):
    kind = "disk"

    def __init__(self, radius=1.0, center=(0.0, 0.0)):
        super().__init__(radius, radius, center, 0.0)
        self.radius = float(radius)

    def __repr__(self):
        return f"Disk(radius={self.radius!r}, center={tuple(self.center)!r})"

    def support(self, theta):
        u = unit(_angles(theta))
        return u @ self.center + self.radius

    def curvature_function(self, theta):
        return np.full(np.shape(_angles(theta)), self.radius)

    def translate(self, v):
        return Disk(self.radius, self.center + np.asarray(v, dtype=float))

    def reflect(self):
        return Disk(self.radius, -self.center)

    def scale(self, lam):
        if lam <= 0:
            return super().scale(lam)
        return Disk(self.radius * lam, self.center * lam)

    def rotate(self, angle):
        c, s = math.cos(angle), math.sin(angle)
        return Disk(self.radius, np.array([[c, -s], [s, c]]) @ self.center)

    def polar(self):
        if not np.any(self.center):
            return Disk(1.0 / self.radius)
        return super().polar()

    def to_dict(self):
        d = {"kind": "disk", "radius": self.radius}
        if np.any(self.center):
            d["center"] = [float(self.center[0]), float(self.center[1])]
        return d

    def _boundary_arrays(self, n):
        t = 2 * np.pi * np.arange(n) / n
        u = unit(t)
        x = self.center + self.radius * u
        return (x, -u, np.full(n, 1.0 / self.radius), self.radius * t, t,
                np.zeros(n, dtype=bool))


class Polygon(ConvexBody):
    """Strictly convex polygon, stored counterclockwise."""

    kind = "polygon"

    def __init__(self, vertices):
        v = np.array(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise DegenerateBodyError("polygon vertices must be a list of [x, y] pairs")
        scale = max(float(np.abs(v).max()) if len(v) else 1.0, 1.0)
        if len(v) > 1 and np.allclose(v[0], v[-1], atol=1e-12 * scale, rtol=0):
            v = v[:-1]
        v = geometry.dedupe(v, 1e-12 * scale)
        if len(v) < 3:
            raise DegenerateBodyError("polygon needs at least 3 distinct vertices")
        if geometry.signed_area(v) < 0:
            v = v[::-1]
        if geometry.polygon_area(v) < MIN_AREA:
            raise DegenerateBodyError("polygon area is below 1e-12")
        e = np.roll(v, -1, axis=0) - v
        cross = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
        if np.any(cross <= 1e-14 * scale ** 2):
            raise DegenerateBodyError("polygon vertices are not in strictly convex position")
        self.vertices = v
        self.normals, self.offsets = geometry.edge_normals(v)

    def __repr__(self):
        return f"Polygon({self.vertices.tolist()!r})"

    def support(self, theta):
        th = _angles(theta)
        u = unit(th)
        if len(self.vertices) <= 64:
            return (np.atleast_2d(u) @ self.vertices.T).max(axis=1).reshape(np.shape(th))
        return geometry.polygon_support(self.vertices, np.atleast_2d(u)).reshape(np.shape(th))

    def boundary_point(self, theta):
        u = np.atleast_2d(unit(_angles(theta)))
        return self.vertices[np.argmax(u @ self.vertices.T, axis=1)]

    def curvature_function(self, theta):
        raise CurvatureUndefinedError(
            "curvature function is undefined for a polygon; smooth it first "
            "(Minkowski sum with a small disk)"
        )

    def contains(self, points, tol=1e-12):
        return geometry.points_in_polygon(self.vertices, points, tol)

    @property
    def area(self):
        return geometry.polygon_area(self.vertices)

    def gauge(self, points):
        if np.min(self.offsets) <= 0:
            raise PreconditionError("origin is not interior to the polygon")
        p = as_points(points)
        return np.maximum((p @ self.normals.T / self.offsets).max(axis=1), 0.0)

    def origin_margin(self, n=256):
        return float(np.min(self.offsets))

    def ray_interval(self, origin, dirs):
        return _cyrus_beck(self.normals, self.offsets, origin, dirs)

    def polygon(self, n=DEFAULT_GRID):
        return self.vertices

    def translate(self, v):
        return Polygon(self.vertices + np.asarray(v, dtype=float))

    def linear(self, a):
        return Polygon(self.vertices @ np.asarray(a, dtype=float).T)

    def reflect(self):
        return Polygon(-self.vertices)

    def polar(self):
        self.require_origin_interior()
        return Polygon(self.normals / self.offsets[:, None])

    def to_grid(self, n=DEFAULT_GRID):
        return SupportGrid(self.support(grid_angles(n)))

    def to_dict(self):
        return {"kind": "polygon", "vertices": self.vertices.tolist()}

    def _boundary_arrays(self, n):
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        length = np.hypot(e[:, 0], e[:, 1])
        cum = np.concatenate([[0.0], np.cumsum(length)])
        perim = cum[-1]
        s = perim * np.arange(n) / n
        idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(v) - 1)
        frac = (s - cum[idx]) / length[idx]
        x = v[idx] + frac[:, None] * e[idx]
        tol = 1e-9
        at_start = frac <= tol
        at_end = frac >= 1 - tol
        out = self.normals[idx].copy()
        prev_n = self.normals[idx - 1]
        next_n = self.normals[(idx + 1) % len(v)]
        bis_start = out + prev_n
        bis_end = out + next_n
        out[at_start] = bis_start[at_start]
        out[at_end] = bis_end[at_end]
        out /= np.linalg.norm(out, axis=1, keepdims=True)
        vertex = at_start | at_end
        x[at_start] = v[idx[at_start]]
        x[at_end] = v[(idx[at_end] + 1) % len(v)]
        kappa = np.where(vertex, np.inf, 0.0)
        theta = np.mod(np.arctan2(out[:, 1], out[:, 0]), 2 * np.pi)
        return x, -out, kappa, s, theta, vertex


class SupportGrid(ConvexBody):
    """Support function sampled at ``theta_k = 2 pi k / n``.

    ``f`` optionally carries exact curvature-function samples, in which case
    the grid stands for the smooth body they came from.  Without ``f`` the
    grid is the circumscribed polygon ``∩ {<y, u_k> <= h_k}`` and
    ``f_k dt`` is the length of its edge with normal ``u_k``:
    ``(h[k+1] + h[k-1] - 2 h[k] cos dt) / (dt sin dt)``.  That stencil is zero
    for pure translations and non-negative exactly when the samples are
    those of a convex body.
    """

    kind = "support_grid"

    def __init__(self, h, f=None):
        h = np.array(h, dtype=float)
        n = len(h)
        if h.ndim != 1 or n < 8 or n & (n - 1):
            raise DegenerateBodyError("support grid size must be a power of two >= 8")
        if not np.all(np.isfinite(h)):
            raise DegenerateBodyError("support values must be finite")
        self.h = h
        self.n = n
        self.dtheta = 2 * np.pi / n
        self.theta = grid_angles(n)
        stencil = self._stencil(h)
        eps = 1e-9 * float(np.max(np.abs(h)))
        if np.min(stencil) < -eps:
            k = int(np.argmin(stencil))
            raise NonConvexGridError(
                f"support grid fails discrete convexity at k={k} (h+h''={stencil[k]:.3g})"
            )
        if f is None:
            self.f = np.maximum(stencil, 0.0)
            self.exact_f = False
        else:
            f = np.array(f, dtype=float)
            if f.shape != h.shape:
                raise DegenerateBodyError("curvature samples must match the support grid")
            if np.min(f) < -eps:
                raise NonConvexGridError("negative curvature-function samples")
            self.f = np.maximum(f, 0.0)
            self.exact_f = True
        if self.area < MIN_AREA:
            raise DegenerateBodyError("support grid encloses area below 1e-12")

    def __repr__(self):
        return f"SupportGrid(n={self.n})"

    def _stencil(self, h):
        dt = self.dtheta
        return (np.roll(h, -1) + np.roll(h, 1) - 2 * math.cos(dt) * h) / (dt * math.sin(dt))

    @property
    def hprime(self):
        return (np.roll(self.h, -1) - np.roll(self.h, 1)) / (2 * math.sin(self.dtheta))

    def _bracket(self, theta):
        th = np.mod(np.asarray(_angles(theta), dtype=float), 2 * np.pi)
        k = np.floor(th / self.dtheta).astype(int) % self.n
        w = th - k * self.dtheta
        return th, k, w

    def support(self, theta):
        # circumscribed polygon: sinusoidal interpolation of h; with exact f,
        # solve h'' + h = f on each cell with f linear
        th, k, w = self._bracket(theta)
        k1 = (k + 1) % self.n
        h0, h1 = self.h[k], self.h[k1]
        lin = 0.0
        if self.exact_f:
            t = w / self.dtheta
            f0, f1 = self.f[k], self.f[k1]
            lin = (1 - t) * f0 + t * f1
            h0, h1 = h0 - f0, h1 - f1
        return lin + (h0 * np.sin(self.dtheta - w) + h1 * np.sin(w)) / math.sin(self.dtheta)

    def curvature_function(self, theta):
        th, k, w = self._bracket(theta)
        t = w / self.dtheta
        return (1 - t) * self.f[k] + t * self.f[(k + 1) % self.n]

    def corner_points(self):
        """Vertices of the circumscribed polygon ``∩ {<y, u_k> <= h_k}``."""
        h0, h1 = self.h, np.roll(self.h, -1)
        s0, c0 = np.sin(self.theta), np.cos(self.theta)
        s1, c1 = np.roll(s0, -1), np.roll(c0, -1)
        return np.column_stack([h0 * s1 - h1 * s0, h1 * c0 - h0 * c1]) / math.sin(self.dtheta)

    def grid_points(self):
        u = unit(self.theta)
        tang = np.column_stack([-u[:, 1], u[:, 0]])
        return self.h[:, None] * u + self.hprime[:, None] * tang

    def boundary_point(self, theta):
        th, k, w = self._bracket(theta)
        x = self.grid_points()
        t = (w / self.dtheta)[..., None]
        return (1 - t) * x[k] + t * x[(k + 1) % self.n]

    def contains(self, points, tol=1e-12):
        p = as_points(points)
        return np.all(p @ unit(self.theta).T <= self.h + tol, axis=1)

    @property
    def area(self):
        return 0.5 * float(np.sum(self.f * self.h)) * self.dtheta

    def gauge(self, points):
        if np.min(self.h) <= 0:
            raise PreconditionError("origin is not interior to the support grid body")
        p = as_points(points)
        return np.maximum((p @ unit(self.theta).T / self.h).max(axis=1), 0.0)

    def origin_margin(self, n=256):
        return float(np.min(self.h))

    def ray_interval(self, origin, dirs):
        return _cyrus_beck(unit(self.theta), self.h, origin, dirs)

    def polygon(self, n=None):
        """The circumscribed polygon, or an area-matched one when ``f`` is exact.

        Grid bodies always polygonize at their native resolution.
        """
        if not self.exact_f:
            return geometry.convex_hull(self.corner_points())
        fmin = np.minimum(np.minimum(np.roll(self.f, 1), self.f), np.roll(self.f, -1))
        pts = self.grid_points() + (fmin * _area_match_factor(self.dtheta))[:, None] * unit(self.theta)
        return geometry.convex_hull(pts)

    def translate(self, v):
        return SupportGrid(self.h + unit(self.theta) @ np.asarray(v, dtype=float),
                           self.f if self.exact_f else None)

    def linear(self, a):
        a = np.asarray(a, dtype=float)
        w = unit(self.theta) @ a
        norm = np.linalg.norm(w, axis=1)
        phi = np.arctan2(w[:, 1], w[:, 0])
        h = norm * self.support(phi)
        if not self.exact_f:
            return SupportGrid(h)
        # radius of curvature transforms as det(A)^2 f(w) / |A^T u|^3
        f = np.linalg.det(a) ** 2 * self.curvature_function(phi) / norm ** 3
        return SupportGrid(h, f)

    def rotate(self, angle):
        steps = angle / self.dtheta
        if abs(steps - round(steps)) < 1e-9:
            k = int(round(steps))
            return SupportGrid(np.roll(self.h, k), np.roll(self.f, k) if self.exact_f else None)
        return super().rotate(angle)

    def reflect(self):
        half = self.n // 2
        return SupportGrid(np.roll(self.h, half), np.roll(self.f, half) if self.exact_f else None)

    def polar(self):
        self.require_origin_interior()
        return SupportGrid(1.0 / self.radial(self.theta))

    def to_grid(self, n=DEFAULT_GRID):
        if n is None or n == self.n:
            return self
        th = grid_angles(n)
        return SupportGrid(self.support(th), self.curvature_function(th) if self.exact_f else None)

    def to_dict(self):
        d = {"kind": "support_grid", "n": self.n, "h": self.h.tolist()}
        if self.exact_f:
            d["f"] = self.f.tolist()
        return d

    def _boundary_arrays(self, n):
        pts = self.grid_points()
        closed = np.vstack([pts, pts[:1]])
        seg = np.linalg.norm(np.diff(closed, axis=0), axis=1)
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        perim = cum[-1]
        s = perim * np.arange(n) / n
        th_closed = np.concatenate([self.theta, [2 * np.pi]])
        theta = np.interp(s, cum, th_closed)
        x = np.column_stack([np.interp(s, cum, closed[:, 0]), np.interp(s, cum, closed[:, 1])])
        f = self.curvature_function(theta)
        with np.errstate(divide="ignore"):
            kappa = np.where(f > 0, 1.0 / f, np.inf)
        return x, -unit(theta), kappa, s, theta, np.zeros(n, dtype=bool)


# --- module-level operations -------------------------------------------------


def gauge(K, p):
    """Minkowski functional ``min{r > 0 : p in rK}``; scalar for a single point."""
    K.require_origin_interior()
    p = np.asarray(p, dtype=float)
    g = K.gauge(p)
    return float(g[0]) if p.ndim == 1 else g


def support(K, d):
    th = angle_of(d)
    h = K.support(th)
    return float(h) if np.ndim(th) == 0 else h


def radial(K, d):
    K.require_origin_interior()
    th = angle_of(d)
    r = K.radial(th)
    return float(np.ravel(r)[0]) if np.ndim(th) == 0 else r


def polar(K):
    return K.polar()


def reflect(A):
    return A.reflect()


def area(K):
    return K.area


def rotate(K, angle):
    return K.rotate(angle)


def perp_body(K):
    """``K`` rotated so that ``h_{perp_body(K)}(u) = h_K(u_perp)``."""
    return K.rotate(-PERP_ROTATION)


def _is_disk(body):
    return isinstance(body, Disk)


def minkowski_sum(A, B, n=DEFAULT_GRID):
    """Minkowski sum; exact for disk pairs, homothetic ellipses and polygon pairs.

    Other combinations are returned as a :class:`SupportGrid` of summed
    support samples; curvature samples are summed too when both operands
    carry exact ones.
    """
    if _is_disk(A) and _is_disk(B):
        return Disk(A.radius + B.radius, A.center + B.center)
    if isinstance(A, Polygon) and isinstance(B, Polygon):
        return Polygon(geometry.minkowski_sum_polygons(A.vertices, B.vertices))
    if isinstance(A, Ellipse) and isinstance(B, Ellipse):
        same_shape = math.isclose(A.a * B.b, A.b * B.a, rel_tol=1e-12)
        same_axes = (math.isclose(A.a, A.b, rel_tol=1e-12)
                     or abs(math.sin(A.rotation - B.rotation)) < 1e-12)
        if same_shape and same_axes:
            lam = B.a / A.a
            return Ellipse(A.a * (1 + lam), A.b * (1 + lam), A.center + B.center, A.rotation)
    if isinstance(A, SupportGrid):
        n = A.n
    elif isinstance(B, SupportGrid):
        n = B.n
    ga, gb = A.to_grid(n), B.to_grid(n)
    f = ga.f + gb.f if (ga.exact_f and gb.exact_f) else None
    return SupportGrid(ga.h + gb.h, f)


def smooth(K, radius=None, n=DEFAULT_GRID):
    """Minkowski sum with a centred disk; default radius is 5% of the diameter."""
    if radius is None:
        radius = 0.05 * K.diameter
    return minkowski_sum(K, Disk(radius), n)


def intersect_convex(A, B, n=DEFAULT_GRID):
    """Vertices of the convex polygon ``A ∩ B`` (shape ``(0, 2)`` when empty)."""
    return geometry.intersect_convex_polygons(A.polygon(n), B.polygon(n))


def curvature_function(K, d, smooth_radius=None):
    """Curvature function ``h + h''`` at outward-normal angle(s) ``d``.

    Polygons raise :class:`CurvatureUndefinedError` unless ``smooth_radius``
    is given, in which case the smoothed proxy is evaluated.
    """
    if isinstance(K, Polygon) and smooth_radius is not None:
        K = smooth(K, smooth_radius)
    th = angle_of(d)
    f = K.curvature_function(th)
    return float(f) if np.ndim(th) == 0 else f


def boundary_sample(G, n):
    """``n`` boundary points uniformly spaced in arc length."""
    if n < 3:
        raise DomainError("boundary_sample needs n >= 3")
    x, nu, kappa, s, theta, vertex = G._boundary_arrays(n)
    return [BoundaryPoint(x[i], nu[i], float(kappa[i]), float(s[i]), float(theta[i]), bool(vertex[i]))
            for i in range(n)]


def hausdorff_distance(A, B, n=4096):
    """``max |h_A - h_B|`` over a direction grid."""
    th = grid_angles(n)
    return float(np.max(np.abs(A.support(th) - B.support(th))))


def centroid(K, n=DEFAULT_GRID):
    if isinstance(K, Ellipse):
        return K.center.copy()
    if isinstance(K, Polygon):
        return geometry.polygon_centroid(K.vertices)
    return geometry.polygon_centroid(K.polygon(n))
