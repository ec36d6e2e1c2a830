import random
from fractions import Fraction

import pytest

from securehull import he, mpc
from securehull.wire import Expect, MsgType, send
from securehull.errors import LengthMismatch, ValueOutOfRange
from securehull.mpc import Ordering, Permutation, SecretVector


def sv(values):
    return SecretVector.of([Fraction(v) for v in values])


def decoded(out):
    return [he.decode_fixed(s) for s in out]


def test_permutation_bijection():
    rng = random.Random(0)
    p = Permutation.random(10, rng)
    items = list(range(10))
    assert sorted(p.apply(items)) == items
    assert p.invert().apply(p.apply(items)) == items
    assert Permutation.identity(3).apply("abc") == list("abc")


def test_vector_add_examples(contexts):
    out = mpc.vector_add_protocol(sv([1, 2, 3]), sv([0, 0, 0]), Permutation.identity(3), contexts)
    assert decoded(out) == [1, 2, 3]
    swap = Permutation((1, 0))
    out = mpc.vector_add_protocol(sv([1, 2]), sv([10, 20]), swap, contexts)
    assert decoded(out) == [22, 11]


def test_vector_add_random(contexts):
    rng = random.Random(1)
    x = [Fraction(rng.randint(-(10**6), 10**6), rng.randint(1, 999)) for _ in range(16)]
    y = [Fraction(rng.randint(-(10**6), 10**6), rng.randint(1, 999)) for _ in range(16)]
    out = mpc.vector_add_protocol(sv(x), sv(y), Permutation.random(16, rng), contexts)
    got = sorted(decoded(out))
    want = sorted(a + b for a, b in zip(x, y))
    assert all(abs(g - w) <= Fraction(1, 2**31) for g, w in zip(got, want))


def test_vector_add_length_mismatch(contexts):
    a, b = contexts
    with pytest.raises(LengthMismatch):
        mpc.run_pair(mpc.vector_add_alice(a, [1, 2]), mpc.vector_add_bob(b, [1], Permutation.identity(1)))


def test_foreign_ciphertexts_rejected(contexts):
    a, b = contexts
    # Bob answers with values outside Z_{n^2}: Alice refuses them
    def rogue_bob(ctx):
        yield Expect(MsgType.VA_ENC_VECTOR)
        yield send(MsgType.VA_PERMUTED_SUM, [ctx.public_key.n2 + 5])

    with pytest.raises(ValueOutOfRange):
        mpc.run_pair(mpc.vector_add_alice(a, [1]), rogue_bob(b))


def test_scalar_product_examples(contexts):
    assert mpc.scalar_product_protocol(sv([1, 0, 0]), sv([0, 1, 0]), contexts) == (0, 0)
    assert mpc.scalar_product_protocol(sv([1, 1, 1]), sv([1, 1, 1]), contexts) == (3, 3)


def test_scalar_product_identity_exact():
    rng = random.Random(2)
    for _ in range(200):
        a = Fraction(rng.randint(-(10**9), 10**9), rng.randint(1, 10**6))
        b = Fraction(rng.randint(-(10**9), 10**9), rng.randint(1, 10**6))
        assert 2 * a * b == a * a + b * b - (a - b) ** 2


@pytest.mark.parametrize("n", [3, 8, 32])
def test_scalar_product_random(contexts, n):
    rng = random.Random(n)
    for _ in range(10):
        # entries within +-16: the quantization error per term is (|a|+|b|) 2^-(f+1)
        a = [Fraction(rng.randint(-(10**6), 10**6), rng.randint(62500, 10**6)) for _ in range(n)]
        b = [Fraction(rng.randint(-(10**6), 10**6), rng.randint(62500, 10**6)) for _ in range(n)]
        ra, rb = mpc.scalar_product_protocol(sv(a), sv(b), contexts)
        assert ra == rb
        assert abs(ra - sum(x * y for x, y in zip(a, b))) <= n * Fraction(1, 2**28)


def test_scalar_product_views(contexts):
    a, b = contexts
    mpc.run_pair(mpc.scalar_product_alice(a, [5, 6]), mpc.scalar_product_bob(b, [1, 2]))
    cats = [c for c, _ in a.views]
    assert cats == ["permuted_difference", "square_sum"]
    assert sorted(a.views[0][1]) == [4, 4]
    assert [c for c, _ in b.views] == ["stage_output"] and b.views[0][1] == 17


@pytest.mark.parametrize("x,y,want", [(5, 5, Ordering.EQUAL), (3, 9, Ordering.LESS), (9, 3, Ordering.GREATER)])
def test_compare_examples(contexts, x, y, want):
    assert mpc.millionaires_compare(x, y, contexts=contexts) == (want, want)


def test_compare_extremes(contexts):
    top = (1 << mpc.DEFAULT_COMPARE_BITS) - 1
    assert mpc.millionaires_compare(0, top, contexts=contexts)[0] == Ordering.LESS
    assert mpc.millionaires_compare(top, top, contexts=contexts)[0] == Ordering.EQUAL
    with pytest.raises(ValueOutOfRange):
        mpc.millionaires_compare(-1, 3, contexts=contexts)
    with pytest.raises(ValueOutOfRange):
        mpc.millionaires_compare(1, top + 1, contexts=contexts)


def test_compare_sweep_and_antisymmetry(contexts):
    # spot-check subset of [0, 63]^2 at t = 6; the full sweep lives in the slow suite
    rng = random.Random(3)
    pairs = [(x, y) for x in range(64) for y in range(64)]
    for x, y in rng.sample(pairs, 120) + [(0, 0), (63, 63), (0, 63), (63, 0)]:
        o, _ = mpc.millionaires_compare(x, y, 6, contexts)
        assert o == Ordering.of(x, y)
        r, _ = mpc.millionaires_compare(y, x, 6, contexts)
        assert r == o.reverse()


@pytest.mark.slow
def test_compare_exhaustive(contexts):
    for x in range(64):
        for y in range(64):
            assert mpc.millionaires_compare(x, y, 6, contexts)[0] == Ordering.of(x, y)


def test_compare_length_mismatch(contexts):
    a, b = contexts
    with pytest.raises(LengthMismatch):
        mpc.run_pair(mpc.compare_alice(a, 3, 6), mpc.compare_bob(b, 3, 7))
