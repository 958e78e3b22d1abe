"""Low-level convex polygon primitives on ``(n, 2)`` float arrays.

Polygons are counterclockwise vertex arrays without a repeated closing vertex.
"""

import numpy as np
from scipy.spatial import ConvexHull

EMPTY = np.zeros((0, 2))


def as_points(p):
    return np.atleast_2d(np.asarray(p, dtype=float))


def signed_area(poly):
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def polygon_area(poly):
    return abs(signed_area(poly))


def polygon_centroid(poly):
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * cross.sum()
    cx = ((x + xn) * cross).sum() / (6.0 * a)
    cy = ((y + yn) * cross).sum() / (6.0 * a)
    return np.array([cx, cy])


def dedupe(poly, tol=0.0):
    """Drop consecutive (cyclic) duplicate vertices closer than ``tol``."""
    if len(poly) < 2:
        return poly
    step = np.linalg.norm(np.roll(poly, -1, axis=0) - poly, axis=1)
    keep = step > tol
    if not keep.any():
        return poly[:1]
    return poly[keep]


def edge_normals(poly):
    """Outward unit normals and offsets ``b`` so that the polygon is ``N y <= b``."""
    e = np.roll(poly, -1, axis=0) - poly
    length = np.hypot(e[:, 0], e[:, 1])
    n = np.column_stack([e[:, 1], -e[:, 0]]) / length[:, None]
    b = np.einsum("ij,ij->i", n, poly)
    return n, b


def clip_halfplane(poly, normal, offset):
    """Clip a convex polygon to ``{y : <y, normal> <= offset}``."""
    if len(poly) == 0:
        return poly
    s = poly @ normal - offset
    inside = s <= 0.0
    n_in = int(np.count_nonzero(inside))
    if n_in == len(s):
        return poly
    if n_in == 0:
        return EMPTY
    # for a convex polygon the inside vertices form one cyclic run
    nxt = np.empty_like(inside)
    nxt[:-1], nxt[-1] = inside[1:], inside[0]
    cross = np.flatnonzero(inside != nxt)
    if len(cross) != 2:
        return _clip_general(poly, s, inside)
    a, b = cross
    if inside[a]:
        leave, enter = a, b
    else:
        leave, enter = b, a
    n = len(poly)
    i1, i2 = (leave + 1) % n, (enter + 1) % n
    p_leave = poly[leave] + s[leave] / (s[leave] - s[i1]) * (poly[i1] - poly[leave])
    p_enter = poly[enter] + s[enter] / (s[enter] - s[i2]) * (poly[i2] - poly[enter])
    if i2 <= leave:
        run = poly[i2:leave + 1]
    else:
        run = np.concatenate([poly[i2:], poly[:leave + 1]])
    return np.concatenate([run, p_leave[None], p_enter[None]])


def _clip_general(poly, s, inside):
    s_next = np.roll(s, -1)
    p_next = np.roll(poly, -1, axis=0)
    cross = inside != np.roll(inside, -1)
    t = np.zeros_like(s)
    t[cross] = s[cross] / (s[cross] - s_next[cross])
    ipts = poly + t[:, None] * (p_next - poly)
    out = np.empty((2 * len(poly), 2))
    keep = np.empty(2 * len(poly), dtype=bool)
    out[0::2], keep[0::2] = poly, inside
    out[1::2], keep[1::2] = ipts, cross
    return out[keep]


def polygon_support(poly, directions):
    """Support values of a convex ccw polygon along unit ``directions`` (m, 2).

    Uses the sorted edge-normal fan, so the cost is O((n + m) log n).
    """
    directions = as_points(directions)
    n, _ = edge_normals(poly)
    ang = np.arctan2(n[:, 1], n[:, 0])
    # edge i has normal ang[i]; vertex i+1 supports normals in [ang[i], ang[i+1]]
    start = int(np.argmin(ang))
    ang = np.roll(ang, -start)
    ang = ang[0] + np.mod(ang - ang[0], 2 * np.pi)
    ang[1:] = np.maximum.accumulate(ang[1:])
    verts = np.roll(poly, -(start + 1), axis=0)
    phi = np.arctan2(directions[:, 1], directions[:, 0])
    phi = ang[0] + np.mod(phi - ang[0], 2 * np.pi)
    idx = np.searchsorted(ang, phi, side="right") - 1
    idx = np.clip(idx, 0, len(verts) - 1)
    best = np.einsum("ij,ij->i", verts[idx], directions)
    # guard against fan-boundary round-off by checking both neighbours
    alt = np.einsum("ij,ij->i", verts[(idx + 1) % len(verts)], directions)
    alt2 = np.einsum("ij,ij->i", verts[idx - 1], directions)
    return np.maximum(best, np.maximum(alt, alt2))


def intersect_convex_polygons(subject, clipper):
    """Intersection of two convex ccw polygons by half-plane clipping.

    Only edges whose supporting lines actually cut the other polygon are
    applied, and the roles are swapped when that means fewer clips.
    """
    if len(subject) < 3 or len(clipper) < 3:
        return EMPTY
    scale = max(np.abs(subject).max(), np.abs(clipper).max(), 1.0)

    def cuts(a, b):
        normals, offsets = edge_normals(b)
        reach = polygon_support(a, normals)
        return normals, offsets, np.nonzero(reach > offsets - 1e-13 * scale)[0]

    normals, offsets, cutting = cuts(subject, clipper)
    if len(cutting) > 8:
        alt = cuts(clipper, subject)
        if len(alt[2]) < len(cutting):
            subject, clipper = clipper, subject
            normals, offsets, cutting = alt
    out = subject
    for j in cutting:
        out = clip_halfplane(out, normals[j], offsets[j])
        if len(out) == 0:
            return EMPTY
    if len(out) < 3:
        return EMPTY
    return out


def convex_hull(points):
    """Counterclockwise hull vertices of a 2-D point cloud."""
    points = as_points(points)
    hull = ConvexHull(points)
    poly = points[hull.vertices]
    if signed_area(poly) < 0:
        poly = poly[::-1]
    return poly


def minkowski_sum_polygons(a, b):
    """Edge-merge Minkowski sum of two convex ccw polygons.

    Parallel edges are fused, so the vertex count is at most ``len(a) + len(b)``.
    """

    def bottom_first(p):
        i = np.lexsort((p[:, 0], p[:, 1]))[0]
        return np.roll(p, -i, axis=0)

    a, b = bottom_first(a), bottom_first(b)
    ea = np.roll(a, -1, axis=0) - a
    eb = np.roll(b, -1, axis=0) - b
    edges = np.vstack([ea, eb])
    ang = np.mod(np.arctan2(edges[:, 1], edges[:, 0]), 2 * np.pi)
    order = np.argsort(ang, kind="stable")
    edges, ang = edges[order], ang[order]
    fused = []
    last = None
    for e, t in zip(edges, ang):
        if last is not None and abs(t - last) < 1e-12:
            fused[-1] = fused[-1] + e
        else:
            fused.append(e.copy())
            last = t
    steps = np.array(fused)
    verts = a[0] + b[0] + np.vstack([np.zeros(2), np.cumsum(steps, axis=0)[:-1]])
    return verts


def points_in_polygon(poly, points, tol=0.0):
    points = as_points(points)
    n, b = edge_normals(poly)
    return np.all(points @ n.T <= b + tol, axis=1)
