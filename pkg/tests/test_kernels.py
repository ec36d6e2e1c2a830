import random

import pytest

from securehull import _purekernels, kernels

BACKENDS = [_purekernels]
try:
    from securehull import _kernels

    BACKENDS.append(_kernels)
except ImportError:  # extension not built
    pass


@pytest.fixture(params=BACKENDS, ids=lambda m: m.BACKEND)
def backend(request):
    return request.param


def test_selected_backend_is_exported():
    assert kernels.BACKEND in {m.BACKEND for m in BACKENDS}


def test_powmod_matches_builtin(backend):
    rng = random.Random(1)
    for bits in (8, 64, 521, 2048):
        m = rng.getrandbits(bits) | 1
        for _ in range(5):
            b, e = rng.getrandbits(bits + 7), rng.getrandbits(bits)
            assert backend.powmod(b, e, m) == pow(b, e, m)
    assert backend.powmod(5, 0, 7) == 1


def test_powmod_many(backend):
    rng = random.Random(2)
    m = rng.getrandbits(300) | 1
    bs = [rng.getrandbits(300) for _ in range(9)]
    es = [rng.getrandbits(200) for _ in range(9)]
    assert backend.powmod_many(bs, es, m) == [pow(b, e, m) for b, e in zip(bs, es)]


def test_negative_operands_rejected(backend):
    with pytest.raises(ValueError):
        backend.powmod(-1, 3, 7)


@pytest.mark.parametrize("window", [1, 4, 6])
def test_fixed_base_table(backend, window):
    rng = random.Random(window)
    m = rng.getrandbits(1024) | 1
    base = rng.getrandbits(1000)
    table = backend.FixedBaseTable(base, m, 256, window)
    for e in [0, 1, 2**255, 2**256 - 1] + [rng.getrandbits(256) for _ in range(10)]:
        assert table.pow(e) == pow(base, e, m)
    with pytest.raises(ValueError):
        table.pow(2**256)


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled kernels not built")
    rng = random.Random(3)
    m = rng.getrandbits(2048) | 1
    base = rng.getrandbits(2040)
    t0, t1 = (k.FixedBaseTable(base, m, 512) for k in BACKENDS)
    for _ in range(20):
        e = rng.getrandbits(512)
        assert t0.pow(e) == t1.pow(e)
