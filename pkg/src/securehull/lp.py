"""Exact rational linear programming (two-phase tableau simplex, Bland's rule).

Small and dense by design: the geometry layer only ever poses problems with a
handful of rows and at most a few dozen columns.
"""

from dataclasses import dataclass
from fractions import Fraction

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

_ZERO = Fraction(0)


@dataclass
class LPResult:
    status: str
    value: Fraction | None = None
    x: list | None = None

    @property
    def feasible(self):
        return self.status != INFEASIBLE


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = [list(r) + [b] for r, b in zip(rows, rhs)]
        self.basis = list(basis)
        self.ncols = len(rows[0]) if rows else 0

    def pivot(self, r, col):
        row = self.rows[r]
        inv = 1 / row[col]
        if inv != 1:
            self.rows[r] = row = [v * inv for v in row]
        for i, other in enumerate(self.rows):
            if i != r:
                f = other[col]
                if f:
                    self.rows[i] = [a - f * b if b else a for a, b in zip(other, row)]
        self.basis[r] = col

    def objective_row(self, cost):
        # reduced costs for maximising cost.x: z_j - c_j
        obj = [-c for c in cost] + [_ZERO]
        for r, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                obj = [o + cb * v for o, v in zip(obj, self.rows[r])]
        return obj

    def optimise(self, cost, allowed):
        """Maximise ``cost . x`` over the current basis; ``allowed`` masks entering columns."""
        while True:
            obj = self.objective_row(cost)
            col = next((j for j in range(self.ncols) if allowed[j] and obj[j] < 0), None)
            if col is None:
                return obj[-1]
            best = None
            for r, row in enumerate(self.rows):
                a = row[col]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return None
            self.pivot(best[1], col)

    def solution(self, n):
        x = [_ZERO] * n
        for r, b in enumerate(self.basis):
            if b < n:
                x[b] = self.rows[r][-1]
        return x


def solve(c, A_ub=(), b_ub=(), A_eq=(), b_eq=()):
    """Maximise ``c . x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

    All inputs are converted to ``Fraction``; the answer is exact.
    """
    n = len(c)
    c = [Fraction(v) for v in c]
    A_ub = [[Fraction(v) for v in row] for row in A_ub]
    A_eq = [[Fraction(v) for v in row] for row in A_eq]
    b_ub = [Fraction(v) for v in b_ub]
    b_eq = [Fraction(v) for v in b_eq]
    n_slack = len(A_ub)
    m = n_slack + len(A_eq)

    rows, rhs, slack_basis = [], [], []
    for i, (row, b) in enumerate(zip(A_ub, b_ub)):
        slack = [_ZERO] * n_slack
        slack[i] = Fraction(1)
        full = row + slack
        if b < 0:
            full, b = [-v for v in full], -b
            slack_basis.append(None)
        else:
            slack_basis.append(n + i)
        rows.append(full)
        rhs.append(b)
    for row, b in zip(A_eq, b_eq):
        full = row + [_ZERO] * n_slack
        if b < 0:
            full, b = [-v for v in full], -b
        rows.append(full)
        rhs.append(b)
        slack_basis.append(None)

    width = n + n_slack
    need_art = [i for i in range(m) if slack_basis[i] is None]
    art_cols = {}
    for k, i in enumerate(need_art):
        art_cols[i] = width + k
    total = width + len(need_art)
    for i in range(m):
        rows[i] = rows[i] + [_ZERO] * len(need_art)
        if i in art_cols:
            rows[i][art_cols[i]] = Fraction(1)
    basis = [slack_basis[i] if slack_basis[i] is not None else art_cols[i] for i in range(m)]
    tab = _Tableau(rows, rhs, basis)
    tab.ncols = total

    if need_art:
        phase1 = [_ZERO] * width + [Fraction(-1)] * len(need_art)
        best = tab.optimise(phase1, [True] * total)
        if best is None or best < 0:
            return LPResult(INFEASIBLE)
        # drive remaining artificials out of the basis
        for r in range(m):
            if tab.basis[r] >= width:
                col = next((j for j in range(width) if tab.rows[r][j] != 0), None)
                if col is not None:
                    tab.pivot(r, col)
        keep = [r for r in range(m) if tab.basis[r] < width]
        tab.rows = [tab.rows[r] for r in keep]
        tab.basis = [tab.basis[r] for r in keep]

    cost = c + [_ZERO] * (total - n)
    allowed = [j < width for j in range(total)]
    value = tab.optimise(cost, allowed)
    if value is None:
        return LPResult(UNBOUNDED)
    return LPResult(OPTIMAL, value, tab.solution(n))


def feasible_point(A_eq, b_eq):
    """Return some ``x >= 0`` with ``A_eq x = b_eq``, or None."""
    n = len(A_eq[0])
    res = solve([0] * n, A_eq=A_eq, b_eq=b_eq)
    return res.x if res.status == OPTIMAL else None
