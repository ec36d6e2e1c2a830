"""Exact-rational convex geometry: hulls, support queries, the separating-set
intersection search, and an LP ground-truth oracle.

Every coordinate is a ``fractions.Fraction``; nothing in this module rounds
except the explicit ``sqrt_approx`` helper, which is only used to pick search
directions (never to decide a verdict).
"""

import enum
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from . import lp
from .errors import DegenerateHull, Inconclusive, OracleScaleExceeded

ORACLE_SCALE_LIMIT = 10_000
DEFAULT_DIRECTION = (Fraction(0), Fraction(0), Fraction(1))


# --------------------------------------------------------------------------
# small vector helpers on 3-tuples of Fractions


def as_rational(value):
    """Parse an int, Fraction, float or decimal/ratio string exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(value)


def as_point(coords):
    p = tuple(as_rational(c) for c in coords)
    if len(p) != 3:
        raise ValueError(f"expected 3 coordinates, got {len(p)}")
    return p


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def neg(a):
    return (-a[0], -a[1], -a[2])


def scale(a, k):
    return (a[0] * k, a[1] * k, a[2] * k)


def cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def sqrt_approx(q, bits=64):
    """Rational ``r`` with ``|r - sqrt(q)| <= 2**-bits`` (floor at that grid)."""
    q = Fraction(q)
    if q < 0:
        raise ValueError("square root of a negative value")
    return Fraction(math.isqrt((q.numerator << (2 * bits)) // q.denominator), 1 << bits)


def norm_approx(v, bits=64):
    return sqrt_approx(dot(v, v), bits)


def format_rational(q):
    """Exact decimal string when one exists, otherwise ``p/q``."""
    q = Fraction(q)
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{q.numerator}/{q.denominator}"
    places = max(twos, fives)
    if places == 0:
        return str(q.numerator)
    scaled = abs(q.numerator) * (10**places // q.denominator)
    digits = str(scaled).rjust(places + 1, "0")
    text = f"{digits[:-places]}.{digits[-places:]}".rstrip("0").rstrip(".")
    return ("-" if q < 0 else "") + text


# --------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class SphericalDirection:
    """A direction on the sphere stored as an unnormalised rational triple.

    Sign tests (``dot(...) < 0``) are scale invariant, so the triple is never
    forced onto the unit sphere; ``norm`` is a cached 2**-64 approximation.
    """

    x: Fraction
    y: Fraction
    z: Fraction

    @classmethod
    def of(cls, v):
        x, y, z = as_point(v)
        if x == 0 and y == 0 and z == 0:
            raise ValueError("zero vector has no direction")
        return cls(x, y, z)

    @property
    def vec(self):
        return (self.x, self.y, self.z)

    @property
    def norm(self):
        cached = self.__dict__.get("_norm")
        if cached is None:
            cached = norm_approx(self.vec)
            object.__setattr__(self, "_norm", cached)
        return cached

    def normalized(self, bits=64):
        """Approximately unit rational triple (error ~2**-bits per component)."""
        n = norm_approx(self.vec, bits)
        return tuple(Fraction(round(c / n * (1 << bits)), 1 << bits) for c in self.vec)

    def __neg__(self):
        return SphericalDirection(-self.x, -self.y, -self.z)

    def dot(self, v):
        return dot(self.vec, v)


@dataclass(frozen=True)
class ConvexHull:
    """Canonical vertex list of a 3-D convex body (extreme points only, lexicographic)."""

    vertices: tuple
    degenerate: bool = False

    def __len__(self):
        return len(self.vertices)

    def translated(self, offset):
        offset = as_point(offset)
        return ConvexHull(tuple(sorted(add(v, offset) for v in self.vertices)), self.degenerate)

    def scaled(self, k):
        k = as_rational(k)
        if k <= 0:
            raise ValueError("scale factor must be positive")
        return ConvexHull(tuple(sorted(scale(v, k) for v in self.vertices)), self.degenerate)

    def to_json(self):
        return {"vertices": [[format_rational(c) for c in v] for v in self.vertices]}

    @classmethod
    def from_json(cls, data):
        return validate_hull(data["vertices"])

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))


class Verdict(enum.Enum):
    INTERSECT = "INTERSECT"
    DISJOINT = "DISJOINT"


@dataclass(frozen=True)
class IntersectionVerdict:
    verdict: Verdict
    iterations: int
    witness: SphericalDirection | None = None

    @property
    def intersects(self):
        return self.verdict is Verdict.INTERSECT


# --------------------------------------------------------------------------
# hull construction


def _affine_rank(pts):
    """Affine dimension of a point set (0..3), exact."""
    if not pts:
        return -1
    p0 = pts[0]
    basis = []
    for p in pts[1:]:
        d = sub(p, p0)
        if d == (0, 0, 0):
            continue
        if not basis:
            basis.append(d)
        elif len(basis) == 1:
            if cross(basis[0], d) != (0, 0, 0):
                basis.append(d)
        elif dot(cross(basis[0], basis[1]), d) != 0:
            return 3
    return len(basis)


def _in_hull(p, pts):
    """Exact: is ``p`` a convex combination of ``pts``?"""
    if not pts:
        return False
    A = [[v[k] for v in pts] for k in range(3)] + [[1] * len(pts)]
    b = [p[0], p[1], p[2], 1]
    return lp.feasible_point(A, b) is not None


_PROBES = [d for d in product((-1, 0, 1), repeat=3) if d != (0, 0, 0)]


def _surely_extreme(pts):
    """Indices that are the unique maximiser of some probe direction."""
    sure = set()
    for d in _PROBES:
        vals = [dot(p, d) for p in pts]
        best = max(vals)
        winners = [i for i, v in enumerate(vals) if v == best]
        if len(winners) == 1:
            sure.add(winners[0])
    return sure


def extreme_points(points):
    pts = sorted(set(as_point(p) for p in points))
    sure = _surely_extreme(pts)
    keep = []
    for i, p in enumerate(pts):
        if i in sure or not _in_hull(p, pts[:i] + pts[i + 1 :]):
            keep.append(p)
    return keep


def validate_hull(points, allow_degenerate=False):
    """Canonical hull of ``points``: deduplicated, extreme points only, sorted.

    Raises DegenerateHull when the points do not span 3-D space, unless
    ``allow_degenerate`` is set, in which case the hull is flagged instead.
    """
    pts = sorted(set(as_point(p) for p in points))
    if not pts:
        raise DegenerateHull("empty point set")
    rank = _affine_rank(pts)
    if rank < 3:
        if not allow_degenerate:
            raise DegenerateHull(f"points span only {rank} dimension(s)")
        return ConvexHull(tuple(extreme_points(pts)), degenerate=True)
    return ConvexHull(tuple(extreme_points(pts)))


# --------------------------------------------------------------------------
# support / extremal queries


def _vec(n):
    return n.vec if isinstance(n, SphericalDirection) else as_point(n)


def support(hull, n):
    """Largest value of ``v . n`` over the hull."""
    n = _vec(n)
    return max(dot(v, n) for v in hull.vertices)


def extremal(hull, n):
    """Vertex attaining the support value; ties go to the lexicographically smallest."""
    n = _vec(n)
    best, arg = None, None
    for v in hull.vertices:  # vertices are sorted, so the first maximiser wins ties
        val = dot(v, n)
        if best is None or val > best:
            best, arg = val, v
    return arg


def minkowski_support(A, B, n):
    n = _vec(n)
    return support(A, n) + support(B, neg(n))


def minkowski_extremal(A, B, n):
    n = _vec(n)
    return sub(extremal(A, n), extremal(B, neg(n)))


def minkowski_difference_explicit(A, B):
    if len(A) * len(B) > ORACLE_SCALE_LIMIT:
        raise OracleScaleExceeded(f"{len(A)}x{len(B)} vertex pairs exceeds {ORACLE_SCALE_LIMIT}")
    return validate_hull([sub(a, b) for a in A.vertices for b in B.vertices], allow_degenerate=True)


def contains_point(hull, p):
    return _in_hull(as_point(p), list(hull.vertices))


# --------------------------------------------------------------------------
# separating set


def _unit_rows(constraints):
    rows = []
    for u in constraints:
        n = u.norm
        rows.append(tuple(c / n for c in u.vec))
    return rows


@dataclass
class SeparatingSetTracker:
    """Open-hemisphere constraints ``{n : n . u_i < 0}`` collected during a search."""

    constraints: list = field(default_factory=list)
    initial: tuple = DEFAULT_DIRECTION

    def add(self, u):
        if not isinstance(u, SphericalDirection):
            u = SphericalDirection.of(u)
        self.constraints.append(u)

    def directions(self):
        return [u.vec for u in self.constraints]

    def candidate(self, tol=0):
        """A direction inside every open hemisphere, or None when the set is empty.

        With ``tol > 0`` the set is treated as empty unless some direction
        clears every constraint by more than ``tol`` (in the max-norm scale).
        """
        if not self.constraints:
            return SphericalDirection.of(self.initial)
        tol = Fraction(tol)
        rows = _unit_rows(self.constraints)
        guess = neg(tuple(sum(r[k] for r in rows) for k in range(3)))
        width = max(abs(c) for c in guess)
        if width and min(-dot(r, guess) for r in rows) > tol * width:
            return SphericalDirection.of(guess)
        return _chebyshev_direction(rows, tol)


def _chebyshev_direction(rows, tol):
    # maximise s  s.t.  u_i . (p - q) + s <= 0,  0 <= p, q <= 1
    A, b = [], []
    for r in rows:
        A.append(list(r) + [-c for c in r] + [1])
        b.append(0)
    for k in range(6):
        e = [0] * 7
        e[k] = 1
        A.append(e)
        b.append(1)
    res = lp.solve([0, 0, 0, 0, 0, 0, 1], A_ub=A, b_ub=b)
    if res.status != lp.OPTIMAL or res.value <= tol:
        return None
    x = res.x
    n = (x[0] - x[3], x[1] - x[4], x[2] - x[5])
    return SphericalDirection.of(n)


def separating_set_feasible(tracker, tol=0):
    return tracker.candidate(tol)


# --------------------------------------------------------------------------
# the intersection search and its oracle


def default_max_iter(n_a, n_b):
    return 16 * (n_a + n_b) + 64


def seed_direction(seed):
    if seed is None:
        return DEFAULT_DIRECTION
    rng = random.Random(seed)
    while True:
        v = tuple(Fraction(rng.randint(-(1 << 20), 1 << 20), 1 << 20) for _ in range(3))
        if v != (0, 0, 0):
            return v


def plaintext_intersects(A, B, seed=None, max_iter=None):
    """Separating-set search for ``origin in A - B`` using only support queries."""
    if max_iter is None:
        max_iter = default_max_iter(len(A), len(B))
    tracker = SeparatingSetTracker(initial=seed_direction(seed))
    for it in range(1, max_iter + 1):
        n = tracker.candidate()
        if n is None:
            return IntersectionVerdict(Verdict.INTERSECT, it - 1)
        v = minkowski_extremal(A, B, n)
        if n.dot(v) < 0:
            return IntersectionVerdict(Verdict.DISJOINT, it, n)
        if v == (0, 0, 0):
            return IntersectionVerdict(Verdict.INTERSECT, it)
        tracker.add(v)
    raise Inconclusive(max_iter)


def oracle_intersects(A, B):
    """Exact LP: is there a point that is a convex combination of both vertex sets?"""
    na, nb = len(A), len(B)
    rows = []
    for k in range(3):
        rows.append([a[k] for a in A.vertices] + [-b[k] for b in B.vertices])
    rows.append([1] * na + [0] * nb)
    rows.append([0] * na + [1] * nb)
    return lp.feasible_point(rows, [0, 0, 0, 1, 1]) is not None


def separation_margin(A, B):
    """Max-norm clearance of the verdict, as a float.

    For intersecting pairs: half-width of the largest origin-centred cube inside
    ``A - B``.  For disjoint pairs: max-norm distance from the origin to ``A - B``.
    Only used to filter near-degenerate pairs out of randomized comparisons.
    """
    import numpy as np
    from scipy.optimize import linprog

    Av = np.array([[float(c) for c in v] for v in A.vertices])
    Bv = np.array([[float(c) for c in v] for v in B.vertices])
    na, nb = len(Av), len(Bv)
    nvar = na + nb + 1  # lambda, mu, t
    conv = np.zeros((2, nvar))
    conv[0, :na] = 1
    conv[1, na : na + nb] = 1
    bounds = [(0, None)] * nvar

    if oracle_intersects(A, B):
        best = math.inf
        for corner in product((-1.0, 1.0), repeat=3):
            eq = np.zeros((5, nvar))
            eq[:3, :na] = Av.T
            eq[:3, na : na + nb] = -Bv.T
            eq[:3, -1] = -np.array(corner)
            eq[3:] = conv
            c = np.zeros(nvar)
            c[-1] = -1.0
            res = linprog(c, A_eq=eq, b_eq=[0, 0, 0, 1, 1], bounds=bounds, method="highs")
            best = min(best, -res.fun if res.status == 0 else 0.0)
        return max(best, 0.0)
    # min t  s.t.  -t <= (A lam - B mu)_k <= t
    ub = np.zeros((6, nvar))
    for k in range(3):
        ub[2 * k, :na] = Av[:, k]
        ub[2 * k, na : na + nb] = -Bv[:, k]
        ub[2 * k, -1] = -1.0
        ub[2 * k + 1, :na] = -Av[:, k]
        ub[2 * k + 1, na : na + nb] = Bv[:, k]
        ub[2 * k + 1, -1] = -1.0
    c = np.zeros(nvar)
    c[-1] = 1.0
    res = linprog(c, A_ub=ub, b_ub=np.zeros(6), A_eq=conv, b_eq=[1, 1], bounds=bounds, method="highs")
    return float(res.fun)
