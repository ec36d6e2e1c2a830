from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from securehull import lp


def test_textbook_optimum():
    res = lp.solve([1, 1], A_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    assert res.status == lp.OPTIMAL
    assert res.value == Fraction(14, 5)
    assert res.x == [Fraction(8, 5), Fraction(6, 5)]


def test_unbounded_and_infeasible():
    assert lp.solve([1], A_ub=[[-1]], b_ub=[-2]).status == lp.UNBOUNDED
    assert lp.solve([0], A_eq=[[1]], b_eq=[-1]).status == lp.INFEASIBLE
    assert lp.feasible_point([[1, 1]], [-1]) is None


def test_redundant_equalities():
    x = lp.feasible_point([[1, 1], [2, 2]], [1, 2])
    assert x is not None and x[0] + x[1] == 1


small = st.integers(-5, 5)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(small, small, small), min_size=1, max_size=5), st.tuples(small, small))
def test_feasible_point_matches_brute_force(rows, target):
    """Feasibility of x >= 0, A x = b on a 2x3 system against a grid search of
    rational vertices (every feasible system has a basic solution)."""
    A = [[r[0] for r in rows], [r[1] for r in rows]]
    b = list(target)
    x = lp.feasible_point(A, b)
    if x is not None:
        assert all(v >= 0 for v in x)
        for row, rhs in zip(A, b):
            assert sum(a * v for a, v in zip(row, x)) == rhs
    else:
        # any basic solution uses at most 2 columns; check them all exactly
        n = len(rows)
        for i in range(n):
            for j in range(i, n):
                a, c = (A[0][i], A[1][i]), (A[0][j], A[1][j])
                det = a[0] * c[1] - a[1] * c[0]
                if det:
                    xi = Fraction(b[0] * c[1] - b[1] * c[0], det)
                    xj = Fraction(a[0] * b[1] - a[1] * b[0], det)
                    assert not (xi >= 0 and xj >= 0)
                else:
                    for col in (a, c):
                        for k in range(2):
                            if col[k]:
                                t = Fraction(b[k], col[k])
                                assert not (t >= 0 and col[1 - k] * t == b[1 - k])
                                break
                        else:
                            assert b != [0, 0]


@pytest.mark.parametrize("c", [[1, 0], [0, 1], [1, 1], [-1, 2]])
def test_box_optimum(c):
    res = lp.solve(c, A_ub=[[1, 0], [0, 1]], b_ub=[3, 7])
    assert res.value == max(c[0], 0) * 3 + max(c[1], 0) * 7
