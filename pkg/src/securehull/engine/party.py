"""Per-party state machine: handshake, the secure intersection loop, and ``poll``.

The whole session is one generator per party.  ``poll`` feeds it a single
inbound frame (or nothing, to let it speak first) and returns the frames it
wants to send; no transport is involved, which makes replay tests trivial.
"""

import enum
import hashlib
import random
import secrets
from dataclasses import dataclass, field
from fractions import Fraction

from .. import direction, geometry, he, mpc
from ..errors import (
    AllZeroSum,
    Inconclusive,
    MalformedFrame,
    ParameterMismatch,
    ProtocolError,
    ProtocolOrderViolation,
    RemoteAbort,
    SecureHullError,
    ValueOutOfRange,
    VersionMismatch,
    error_class,
)
from ..wire import VERSION, Expect, Frame, MsgType, Send, send
from .config import SessionConfig
from .transcript import SecretRecord, Transcript

EPSILON = Fraction(1, 1 << 24)  # slack for decisions made on reconstructed directions
OFFSET_LOW = Fraction(1, 4)


class Phase(enum.Enum):
    HANDSHAKE = "HANDSHAKE"
    QUERY = "QUERY"
    RATIO = "RATIO"
    SIGN = "SIGN"
    VERDICT = "VERDICT"
    DONE = "DONE"
    ABORTED = "ABORTED"


_PHASE_OF = {
    MsgType.HELLO: Phase.HANDSHAKE,
    MsgType.HELLO_ACK: Phase.HANDSHAKE,
    MsgType.VA_PUBKEY: Phase.HANDSHAKE,
    MsgType.DIR_SIGN: Phase.SIGN,
    MsgType.MC_ENC_BITS: Phase.SIGN,
    MsgType.MC_RANDOMIZED: Phase.SIGN,
    MsgType.MC_VERDICT: Phase.SIGN,
    MsgType.DIR_STAGE1: Phase.RATIO,
    MsgType.DIR_STAGE2: Phase.RATIO,
    MsgType.VA_ENC_VECTOR: Phase.RATIO,
    MsgType.VA_PERMUTED_SUM: Phase.RATIO,
    MsgType.SP_BOB_SQUARES: Phase.RATIO,
    MsgType.SP_RESULT: Phase.RATIO,
    MsgType.VERDICT: Phase.VERDICT,
}


def _seed_int(seed, label):
    return int.from_bytes(hashlib.sha256(f"{seed}:{label}".encode()).digest()[:16], "big")


@dataclass
class PartyState:
    """One party of a session.  Mutated in place by ``poll``."""

    role: str
    hull: geometry.ConvexHull
    config: SessionConfig
    keypair: he.HEKeyPair | None = None
    phase: Phase = Phase.HANDSHAKE
    tracker: geometry.SeparatingSetTracker = field(default_factory=geometry.SeparatingSetTracker)
    transcript: Transcript = None
    secrets: SecretRecord = None
    verdict: geometry.IntersectionVerdict | None = None
    error: SecureHullError | None = None
    max_iter: int | None = None

    def __post_init__(self):
        if self.role not in ("A", "B"):
            raise ValueError("role must be 'A' or 'B'")
        if self.hull.degenerate:
            raise geometry.DegenerateHull("flat hulls are not accepted by the secure protocol")
        seed = self.config.seed if self.config.seed is not None else secrets.randbits(128)
        self._seed = seed
        self.transcript = Transcript(self.role)
        self.secrets = SecretRecord(vertices=list(self.hull.vertices))
        self.ctx = mpc.PartyContext(
            self.role, random.Random(_seed_int(seed, self.role)), frac_bits=self.config.frac_bits
        )
        self.ctx.views = self.transcript.views
        if self.role == "A":
            if self.keypair is None:
                key_seed = _seed_int(seed, "key") if self.config.seed is not None else None
                self.keypair = he.keygen(self.config.key_bits, seed=key_seed)
            elif self.keypair.key_bits != self.config.key_bits:
                raise ParameterMismatch("keypair size differs from configured key_bits")
            self.ctx.keypair = self.keypair
            self.ctx.public_key = self.keypair.public_key
        self._gen = session(self)
        self._waiting = None
        self._started = False

    @property
    def done(self):
        return self.phase in (Phase.DONE, Phase.ABORTED)


# --------------------------------------------------------------------------
# session script


def _hello_values(state):
    cfg = state.config
    commitment = _seed_int(state._seed, f"commit-{state.role}")
    state.nonce = state.ctx.rng.getrandbits(128)
    return [VERSION, cfg.key_bits, cfg.frac_bits, cfg.max_iter or 0, commitment, state.nonce, len(state.hull)]


def _check_hello(state, values):
    if len(values) != 7:
        raise MalformedFrame("handshake message must carry 7 fields")
    version, key_bits, frac_bits, max_iter, _commit, nonce, count = values
    cfg = state.config
    if version != VERSION:
        raise VersionMismatch(f"peer protocol version {version}, ours {VERSION}")
    for name, theirs, ours in (
        ("key_bits", key_bits, cfg.key_bits),
        ("frac_bits", frac_bits, cfg.frac_bits),
        ("max_iter", max_iter, cfg.max_iter or 0),
    ):
        if theirs != ours:
            raise ParameterMismatch(f"{name}: peer {theirs}, ours {ours}")
    if count < 4:
        raise ValueOutOfRange("peer hull has fewer than 4 vertices")
    if not 0 <= nonce < 1 << 128:
        raise ValueOutOfRange("handshake nonce outside 128 bits")
    state.ctx.view("parameters", tuple(values))
    return nonce, count


def handshake(state):
    ctx = state.ctx
    if state.role == "A":
        yield send(MsgType.HELLO, _hello_values(state))
        peer_nonce, peer_count = _check_hello(state, (yield Expect(MsgType.HELLO_ACK)))
        pk = ctx.public_key
        yield send(MsgType.VA_PUBKEY, [pk.key_bits, pk.n, pk.hs])
        nonces = (state.nonce, peer_nonce)
    else:
        peer_nonce, peer_count = _check_hello(state, (yield Expect(MsgType.HELLO)))
        yield send(MsgType.HELLO_ACK, _hello_values(state))
        values = yield Expect(MsgType.VA_PUBKEY)
        if len(values) != 3:
            raise MalformedFrame("public key message must carry 3 fields")
        key_bits, n, hs = values
        if key_bits != state.config.key_bits or n.bit_length() != key_bits or not 0 < hs < n * n:
            raise ParameterMismatch("public key does not match the agreed key size")
        ctx.public_key = he.PublicKey(n, hs, key_bits)
        ctx.view("public_key", (key_bits, n, hs))
        nonces = (peer_nonce, state.nonce)
    counts = (len(state.hull), peer_count) if state.role == "A" else (peer_count, len(state.hull))
    state.max_iter = state.config.max_iter or geometry.default_max_iter(*counts)
    state.coin_seed = hashlib.sha256(b"".join(v.to_bytes(16, "big") for v in nonces)).digest()


def public_offset(coin_seed, iteration, frac_bits):
    """Shared dyadic offset, each component of magnitude in [1/4, 1/2).

    A adds it to its point and B subtracts it, so the sum is unchanged while
    exact-zero coordinates (which the ratio pipeline cannot take) are pushed
    away from zero.
    """
    digest = hashlib.sha256(coin_seed + iteration.to_bytes(4, "big")).digest()
    span = frac_bits - 2
    out = []
    for k in range(3):
        word = int.from_bytes(digest[8 * k : 8 * k + 8], "big")
        mag = OFFSET_LOW + Fraction(word % (1 << span), 1 << frac_bits)
        out.append(-mag if (word >> 63) & 1 else mag)
    return tuple(out)


def submitted_point(state, n, iteration):
    """The point this party feeds to the direction protocol for query ``n``."""
    if state.role == "A":
        p = geometry.extremal(state.hull, n)
        off = public_offset(state.coin_seed, iteration, state.config.frac_bits)
        return geometry.add(p, off)
    p = geometry.neg(geometry.extremal(state.hull, -n))
    off = public_offset(state.coin_seed, iteration, state.config.frac_bits)
    return geometry.sub(p, off)


def secure_loop(state):
    tracker = state.tracker
    for it in range(1, state.max_iter + 1):
        state.phase = Phase.QUERY
        n = tracker.candidate(EPSILON)
        if n is None:
            return geometry.IntersectionVerdict(geometry.Verdict.INTERSECT, it - 1)
        point = submitted_point(state, n, it)
        state.secrets.submitted.append(point)
        try:
            resolved = yield from direction.direction_protocol(state.ctx, point)
        except AllZeroSum:  # the sum is the origin: touching
            return geometry.IntersectionVerdict(geometry.Verdict.INTERSECT, it)
        u = resolved.unit
        if geometry.dot(n.normalized(), u.vec) < -EPSILON:
            return geometry.IntersectionVerdict(geometry.Verdict.DISJOINT, it, n)
        tracker.add(u)
    raise Inconclusive(state.max_iter)


def session(state):
    yield from handshake(state)
    verdict = yield from secure_loop(state)
    state.phase = Phase.VERDICT
    mine = [1 if verdict.intersects else 0, verdict.iterations]
    if state.role == "A":
        yield send(MsgType.VERDICT, mine)
        theirs = yield Expect(MsgType.VERDICT)
    else:
        theirs = yield Expect(MsgType.VERDICT)
        yield send(MsgType.VERDICT, mine)
    if list(theirs) != mine:
        raise ProtocolError(f"verdicts disagree: ours {mine}, peer {list(theirs)}")
    state.ctx.view("verdict", tuple(mine))
    return verdict


# --------------------------------------------------------------------------
# poll


def _remote_error(frame):
    name, detail = frame.abort_info()
    cls = error_class(name)
    if cls is not None and issubclass(cls, ProtocolError) and cls is not RemoteAbort:
        return cls(f"peer aborted: {detail}")
    return RemoteAbort(name, detail)


def poll(state, incoming=None):
    """Advance ``state`` by one inbound frame (or none); return ``(state, outgoing, verdict)``.

    Each party is started by one call without a frame.

    An out-of-turn or unexpected frame raises ProtocolOrderViolation and leaves
    the state untouched.  A protocol failure inside the session marks the
    state ABORTED, records the error on ``state.error`` and returns an ABORT
    frame for the peer.
    """
    if state.done:
        if incoming is not None:
            raise ProtocolOrderViolation(f"session already {state.phase.value}")
        return state, [], state.verdict
    feed = None
    if incoming is not None:
        if incoming.msg_type == MsgType.ABORT:
            state.transcript.record("recv", incoming)
            state.phase = Phase.ABORTED
            state.error = _remote_error(incoming)
            raise state.error
        if state._waiting is None:
            raise ProtocolOrderViolation(f"{incoming.msg_type.name} arrived during our turn to send")
        if incoming.msg_type != state._waiting.msg_type:
            raise ProtocolOrderViolation(
                f"expected {state._waiting.msg_type.name}, got {incoming.msg_type.name} in {state.phase.value}"
            )
        feed = incoming.values()  # may raise MalformedFrame; state still untouched
        state.transcript.record("recv", incoming)
    elif state._started and state._waiting is not None:
        return state, [], None

    outgoing = []
    try:
        step = state._gen.send(feed) if state._started else next(state._gen)
        state._started = True
        while isinstance(step, Send):
            frame = Frame.of(step.msg_type, step.values)
            state.transcript.record("sent", frame)
            outgoing.append(frame)
            state.phase = _PHASE_OF[step.msg_type]
            step = state._gen.send(None)
        state._waiting = step
        state.phase = _PHASE_OF[step.msg_type]
        return state, outgoing, None
    except StopIteration as stop:
        state._waiting = None
        state.verdict = stop.value
        state.phase = Phase.DONE
        return state, outgoing, state.verdict
    except SecureHullError as exc:
        state._waiting = None
        state.phase = Phase.ABORTED
        state.error = exc
        abort = Frame.abort(type(exc).__name__, str(exc))
        state.transcript.record("sent", abort)
        outgoing.append(abort)
        return state, outgoing, None
