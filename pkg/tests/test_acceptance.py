"""Acceptance criteria 1 to 8, one summary line each (see the end of the pytest run)."""

import random
import time
from fractions import Fraction

import pytest

from securehull import direction as d
from securehull import geometry as g
from securehull import he, mpc, shapes
from securehull.direction import Axis, PrivateVec3
from securehull.engine import SessionConfig, audit_session, audit_transcript, run_session

from .conftest import report_criterion

DELTA = 2.0**-10
REL = Fraction(1, 2**20)


def _rand_rational(rng, lo, hi, den=10**6):
    return Fraction(rng.randint(lo * den, hi * den), rng.randint(den // 16, den))


# --------------------------------------------------------------------------
# 1. homomorphism


def test_criterion_1_homomorphism():
    start = time.perf_counter()
    bad = 0
    for bits in (1024, 2048):
        kp = he.keygen(bits, seed=bits)
        pk, sk = kp.public_key, kp.secret_key
        rng = random.Random(bits)
        lim = pk.half // 2
        for _ in range(1000):
            a, b = rng.randrange(-lim, lim), rng.randrange(-lim, lim)
            bad += sk.decrypt(he.hom_add(pk, pk.encrypt(a, rng), pk.encrypt(b, rng))) != a + b
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 60
    report_criterion(1, ok, f"2000 pairs over 1024/2048-bit keys, {bad} mismatches, {elapsed:.1f} s (< 60 s)")
    assert ok


# --------------------------------------------------------------------------
# 2. scalar product


def test_criterion_2_scalar_product(keypair):
    start = time.perf_counter()
    ctx = mpc.local_contexts(keypair=keypair, seed=2)
    rng = random.Random(2)
    worst = Fraction(0)
    bad = 0
    counts = {3: 167, 8: 167, 32: 166}
    for n, reps in counts.items():
        for _ in range(reps):
            # entries within +-16 so the 2^-(f+1) input quantization stays inside n 2^-28
            a = [_rand_rational(rng, -1, 1) for _ in range(n)]
            b = [_rand_rational(rng, -1, 1) for _ in range(n)]
            ra, rb = mpc.scalar_product_protocol(mpc.SecretVector.of(a), mpc.SecretVector.of(b), ctx)
            err = abs(ra - sum(x * y for x, y in zip(a, b)))
            worst = max(worst, err / n)
            bad += ra != rb or err > n * Fraction(1, 2**28)
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 300
    report_criterion(
        2, ok, f"500 pairs n in (3, 8, 32), {bad} outside n*2^-28, worst err/n {float(worst):.2e}, {elapsed:.1f} s"
    )
    assert ok


# --------------------------------------------------------------------------
# 3. ratio protocol


def _nonzero_vec(rng):
    while True:
        v = tuple(_rand_rational(rng, -20, 20, 1000) for _ in range(3))
        if all(v):
            return v


def test_criterion_3_ratio_algebra(keypair):
    ctx = mpc.local_contexts(keypair=keypair, seed=3)
    rng = random.Random(3)
    identity_bad = phi_bad = theta_bad = 0
    worst = Fraction(0)
    done = 0
    while done < 300:
        va, vb = _nonzero_vec(rng), _nonzero_vec(rng)
        s = g.add(va, vb)
        if not all(s):
            continue
        pa, pb = PrivateVec3.of(va), PrivateVec3.of(vb)
        for axes in (d.PHI_AXES, d.THETA_X_AXES, d.THETA_Y_AXES):
            num, den, aux = axes
            got = g.dot(d.stage_one_inputs("A", pa, axes), d.stage_one_inputs("B", pb, axes))
            identity_bad += got != (pa[den] + pb[den]) ** 2 / (pa[num] * pb[num] * pa[aux] * pb[aux]) ** 2
        phi, _ = d.run_ratio(va, vb, d.PHI_AXES, ctx)
        tx, _ = d.run_ratio(va, vb, d.THETA_X_AXES, ctx)
        ty, _ = d.run_ratio(va, vb, d.THETA_Y_AXES, ctx)
        want_phi = (s[1] / s[0]) ** 2
        want_theta = (s[0] ** 2 + s[1] ** 2) / s[2] ** 2
        e_phi = abs(phi.value - want_phi) / want_phi
        e_theta = abs(tx.value + ty.value - want_theta) / want_theta
        worst = max(worst, e_phi, e_theta)
        phi_bad += e_phi > REL
        theta_bad += e_theta > REL
        done += 1
    ok = identity_bad == phi_bad == theta_bad == 0
    report_criterion(
        3,
        ok,
        f"300 pairs, stage-one identity errors {identity_bad}, tan2phi misses {phi_bad}, "
        f"tan2theta misses {theta_bad}, worst rel err {float(worst):.2e} (tol 2^-20)",
    )
    assert ok


# --------------------------------------------------------------------------
# 4. sign tables


def _sign_case(ctx, axis, a, b):
    ca, cb = ctx
    va = [1, 1, 1]
    vb = [1, 1, 1]
    va[axis], vb[axis] = a, b
    sa, sb, _ = mpc.run_pair(d.sign_of_sum(ca, PrivateVec3.of(va), axis), d.sign_of_sum(cb, PrivateVec3.of(vb), axis))
    want = (a + b > 0) - (a + b < 0)
    return sa == sb and int(sa.sign) == want


def _sign_sweep(keypair, values):
    ctx = mpc.local_contexts(keypair=keypair, seed=4)
    bad = cases = compared = 0
    for axis in Axis:
        for a in values:
            for b in values:
                cases += 1
                compared += a * b < 0
                bad += not _sign_case(ctx, axis, a, b)
    return bad, cases, compared


@pytest.mark.slow
def test_criterion_4_sign_tables(keypair):
    start = time.perf_counter()
    bad, cases, compared = _sign_sweep(keypair, range(-63, 64))
    ok = bad == 0
    report_criterion(
        4,
        ok,
        f"all (a, b) in [-63, 63]^2 on each of 3 axes: {cases} cases, {compared} via comparison, "
        f"{bad} wrong, {time.perf_counter() - start:.0f} s",
    )
    assert ok


def test_criterion_4_sign_tables_smoke(keypair):
    bad, cases, _ = _sign_sweep(keypair, [-63, -17, -2, -1, 0, 1, 2, 17, 63])
    assert bad == 0, f"{bad} of {cases}"


# --------------------------------------------------------------------------
# 5. end-to-end


def _pair_stream(seed):
    rng = random.Random(seed)
    while True:
        na, nb = rng.randint(8, 32), rng.randint(8, 32)
        a = shapes.random_hull(na, rng.getrandbits(32), Fraction(rng.randint(48, 96), 64))
        center = tuple(Fraction(rng.randint(-160, 160), 64) for _ in range(3))
        b = shapes.random_hull(nb, rng.getrandbits(32), Fraction(rng.randint(48, 96), 64), center)
        yield a, b


def _end_to_end(keypair, count, seed):
    stream = _pair_stream(seed)
    bad = skipped = hits = 0
    checked = 0
    start = time.perf_counter()
    while checked < count:
        a, b = next(stream)
        if g.separation_margin(a, b) <= DELTA:
            skipped += 1
            continue
        oracle = g.oracle_intersects(a, b)
        plain = g.plaintext_intersects(a, b)
        res = run_session(a, b, SessionConfig(key_bits=1024, seed=checked + 1000 * seed), keypair)
        same = res.verdict_a == res.verdict_b
        bad += not (same and res.verdict_a.intersects == plain.intersects == oracle)
        hits += oracle
        checked += 1
    return bad, hits, skipped, time.perf_counter() - start


@pytest.mark.slow
def test_criterion_5_end_to_end(keypair):
    bad, hits, skipped, elapsed = _end_to_end(keypair, 200, seed=5)
    ok = bad == 0 and elapsed < 20 * 60
    report_criterion(
        5,
        ok,
        f"200 pairs (8-32 vertices, {hits} intersecting), {bad} disagreements, "
        f"{skipped} below margin 2^-10 excluded, {elapsed:.0f} s",
    )
    assert ok


def test_criterion_5_smoke(keypair):
    bad, hits, skipped, elapsed = _end_to_end(keypair, 20, seed=55)
    assert bad == 0 and elapsed < 120, (bad, elapsed)
    assert 0 < hits < 20


# --------------------------------------------------------------------------
# 6. pyramid and cuboid


def test_criterion_6_pyramid_cuboid(keypair):
    box = shapes.cuboid(1, (0, 0, 0), (2, 2, 1))  # top face at z = 1/2
    placements = {
        "overlapping": (Fraction(0), True),
        "touching": (Fraction(1, 2), True),
        "disjoint": (Fraction(3, 4), False),
    }
    parts, ok = [], True
    for name, (base_z, expected) in placements.items():
        pyr = shapes.pyramid(1, (0, 0, base_z))
        oracle = g.oracle_intersects(pyr, box)
        res = run_session(pyr, box, SessionConfig(key_bits=1024, seed=6), keypair)
        good = res.verdict_a == res.verdict_b and res.verdict_a.intersects == oracle == expected
        ok &= good
        parts.append(f"{name} {res.verdict_a.verdict.value}")
    report_criterion(6, ok, ", ".join(parts) + " (oracle agrees)" if ok else ", ".join(parts))
    assert ok


# --------------------------------------------------------------------------
# 7. leakage audit


def test_criterion_7_audit(keypair):
    stream = _pair_stream(7)
    total = 0
    last = None
    for i in range(50):
        a, b = next(stream)
        res = run_session(a, b, SessionConfig(key_bits=1024, seed=700 + i), keypair)
        total += len(audit_session(res.transcripts, res.secrets, 32))
        last = res
    t = last.state_a.transcript
    t.view("stage_output", round(last.secrets["B"].vertices[0][2] * 2**32))
    injected = len(audit_transcript(t, last.secrets["B"], 32))
    ok = total == 0 and injected == 1
    report_criterion(7, ok, f"50 honest sessions, {total} violations; injected raw coordinate gives {injected}")
    assert ok


# --------------------------------------------------------------------------
# 8. determinism and transport parity


def test_criterion_8_determinism():
    a = shapes.random_hull(12, 81)
    b = shapes.random_hull(10, 82, 1, (Fraction(3, 2), Fraction(1, 5), 0))
    cfg = SessionConfig(key_bits=1024, seed=8)
    runs = [run_session(a, b, cfg, kind=k) for k in ("memory", "tcp", "memory")]
    texts = [(r.state_a.transcript.to_jsonl(), r.state_b.transcript.to_jsonl()) for r in runs]
    ok = texts[0] == texts[1] == texts[2] and len(texts[0][0]) > 0
    frames = len(runs[0].state_a.transcript.frames)
    report_criterion(8, ok, f"memory, tcp loopback, memory again: {frames} frame records, transcripts identical: {ok}")
    assert ok
