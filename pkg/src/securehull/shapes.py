"""Named shape generators: square pyramid, axis-aligned cuboid, random sphere hull."""

import random
from fractions import Fraction

from .geometry import as_point, as_rational, validate_hull


def _place(points, scale, center):
    s = as_rational(scale)
    c = as_point(center)
    return [tuple(p[k] * s + c[k] for k in range(3)) for p in points]


def pyramid(scale=1, center=(0, 0, 0)):
    """Square pyramid: unit base centred under ``center``, apex one unit above."""
    h = Fraction(1, 2)
    base = [(sx * h, sy * h, Fraction(0)) for sx in (-1, 1) for sy in (-1, 1)]
    return validate_hull(_place(base + [(Fraction(0), Fraction(0), Fraction(1))], scale, center))


def cuboid(scale=1, center=(0, 0, 0), dims=(1, 1, 1)):
    """Axis-aligned box with edge lengths ``scale * dims`` centred at ``center``."""
    d = as_point(dims)
    corners = [tuple(sk * dk / 2 for sk, dk in zip(signs, d)) for signs in _SIGNS]
    return validate_hull(_place(corners, scale, center))


_SIGNS = [(sx, sy, sz) for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]


def sphere_point(u, v):
    """Inverse stereographic projection: an exactly-unit rational point."""
    d = u * u + v * v + 1
    return (2 * u / d, 2 * v / d, (u * u + v * v - 1) / d)


def random_hull(n_vertices, seed=0, scale=1, center=(0, 0, 0), grid=64):
    """Hull of ``n_vertices`` distinct rational points on a sphere.

    Every point on a sphere is extreme, so the hull keeps all of them.
    """
    if n_vertices < 4:
        raise ValueError("a 3-D hull needs at least 4 vertices")
    rng = random.Random(seed)
    pts = set()
    while len(pts) < n_vertices:
        u = Fraction(rng.randint(-3 * grid, 3 * grid), grid)
        v = Fraction(rng.randint(-3 * grid, 3 * grid), grid)
        pts.add(sphere_point(u, v))
    return validate_hull(_place(sorted(pts), scale, center))


GENERATORS = {"pyramid": pyramid, "cuboid": cuboid, "random": random_hull}
