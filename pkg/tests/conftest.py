import random
from fractions import Fraction

import pytest

from securehull import geometry as g
from securehull import he, mpc


@pytest.fixture(scope="session")
def keypair():
    return he.keygen(1024, seed=2024)


@pytest.fixture
def contexts(keypair):
    return mpc.local_contexts(keypair=keypair, seed=99)


def cube(lo=0, hi=1):
    return g.validate_hull([(x, y, z) for x in (lo, hi) for y in (lo, hi) for z in (lo, hi)])


def centered_cube(center=(0, 0, 0), side=1):
    h = Fraction(side) / 2
    c = g.as_point(center)
    return g.validate_hull(
        [(c[0] + sx * h, c[1] + sy * h, c[2] + sz * h) for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)]
    )


def random_points(rng, n, span=8, den=4):
    return [tuple(Fraction(rng.randint(-span * den, span * den), den) for _ in range(3)) for _ in range(n)]


def random_hull(rng, n, span=8, den=4):
    while True:
        try:
            return g.validate_hull(random_points(rng, n, span, den))
        except g.DegenerateHull:
            continue


@pytest.fixture
def rng():
    return random.Random(12345)


# acceptance lines, printed once at the end of the run
ACCEPTANCE = {}


def report_criterion(number, ok, detail):
    line = f"acceptance criterion {number}: {'PASS' if ok else 'FAIL'} | {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
