"""Planar convex bodies, the density of a body inside dilates of another, and
numerical checks of the conditions under which that density is constant."""

from .bodies import (
    BoundaryPoint,
    ConvexBody,
    CurvatureUndefinedError,
    DegenerateBodyError,
    Direction,
    Disk,
    DomainError,
    Ellipse,
    GeometryError,
    NonConvexGridError,
    Polygon,
    PreconditionError,
    SupportGrid,
    area,
    boundary_sample,
    curvature_function,
    gauge,
    hausdorff_distance,
    intersect_convex,
    minkowski_sum,
    perp,
    perp_body,
    polar,
    radial,
    reflect,
    smooth,
    support,
)
from .density import delta, density_profile, f_phi, is_kdense, layer_cake, max_k_distance

__version__ = "0.1.0"
