"""Private intersection testing for two parties' 3-D convex hulls."""

from .geometry import ConvexHull, IntersectionVerdict, Verdict, oracle_intersects, plaintext_intersects, validate_hull
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConvexHull",
    "IntersectionVerdict",
    "Verdict",
    "oracle_intersects",
    "plaintext_intersects",
    "validate_hull",
]
