"""Two-party building blocks over the additive scheme: permuted vector addition,
scalar product, and a bitwise magnitude comparison.

Each protocol is a pair of generators, one per party.  The key holder is
called Alice (role A) and the other party Bob (role B).  Generators yield
``Send``/``Expect`` steps and return the party's output; ``run_pair`` drives
a pair in-process for tests and one-off use.
"""

import enum
import hashlib
import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import he
from .errors import LengthMismatch, ProtocolOrderViolation, ValueOutOfRange
from .wire import Expect, Frame, MsgType, parse_frame, send

DEFAULT_COMPARE_BITS = he.DEFAULT_FRAC_BITS + 61


@dataclass
class PartyContext:
    """Per-party protocol resources: role, RNG, key material and decrypted-view log."""

    role: str
    rng: random.Random
    public_key: he.PublicKey | None = None
    keypair: he.HEKeyPair | None = None
    frac_bits: int = he.DEFAULT_FRAC_BITS
    views: list = field(default_factory=list)

    @property
    def secret_key(self):
        return self.keypair.secret_key

    def view(self, category, value):
        self.views.append((category, value))

    def encrypt(self, m):
        return self.public_key.encrypt(m, self.rng)

    def ciphertexts(self, values):
        pk = self.public_key
        n2 = pk.n2
        for v in values:
            if not 0 < v < n2:
                raise ValueOutOfRange("ciphertext outside Z_{n^2}")
        return [he.Ciphertext(v, pk.key_id) for v in values]


def party_rng(seed, role):
    digest = hashlib.sha256(f"{seed}:{role}".encode()).digest()
    return random.Random(int.from_bytes(digest, "big"))


# --------------------------------------------------------------------------
# value types


@dataclass(frozen=True)
class Permutation:
    """Bijection on positions: ``apply(v)[mapping[i]] == v[i]``."""

    mapping: tuple

    def __post_init__(self):
        if sorted(self.mapping) != list(range(len(self.mapping))):
            raise ValueError("mapping is not a bijection")

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(n)))

    @classmethod
    def random(cls, n, rng):
        m = list(range(n))
        rng.shuffle(m)
        return cls(tuple(m))

    def __len__(self):
        return len(self.mapping)

    def apply(self, seq):
        if len(seq) != len(self.mapping):
            raise LengthMismatch(f"permutation of {len(self.mapping)} applied to {len(seq)} items")
        out = [None] * len(seq)
        for i, item in enumerate(seq):
            out[self.mapping[i]] = item
        return out

    def invert(self):
        inv = [0] * len(self.mapping)
        for i, j in enumerate(self.mapping):
            inv[j] = i
        return Permutation(tuple(inv))


@dataclass(frozen=True)
class SecretVector:
    entries: tuple

    @classmethod
    def of(cls, values, f=he.DEFAULT_FRAC_BITS):
        return cls(tuple(v if isinstance(v, he.FixedPointScalar) else he.encode_fixed(v, f) for v in values))

    def __len__(self):
        return len(self.entries)

    @property
    def raws(self):
        return [e.raw for e in self.entries]

    @property
    def frac_bits(self):
        return self.entries[0].frac_bits if self.entries else he.DEFAULT_FRAC_BITS


class Ordering(enum.IntEnum):
    LESS = 0
    EQUAL = 1
    GREATER = 2

    def reverse(self):
        return Ordering(2 - self.value)

    @classmethod
    def of(cls, a, b):
        return cls.LESS if a < b else cls.GREATER if a > b else cls.EQUAL


# --------------------------------------------------------------------------
# vector addition: Alice learns pi(x + y)


def vector_add_alice(ctx, x_raw, category="permuted_sum"):
    yield send(MsgType.VA_ENC_VECTOR, [ctx.encrypt(v).value for v in x_raw])
    values = yield Expect(MsgType.VA_PERMUTED_SUM)
    if len(values) != len(x_raw):
        raise LengthMismatch(f"sent {len(x_raw)} entries, received {len(values)}")
    sk = ctx.secret_key
    out = [sk.decrypt(c) for c in ctx.ciphertexts(values)]
    ctx.view(category, tuple(out))
    return out


def vector_add_bob(ctx, y_raw, perm):
    values = yield Expect(MsgType.VA_ENC_VECTOR)
    if len(values) != len(y_raw):
        raise LengthMismatch(f"peer vector has {len(values)} entries, own has {len(y_raw)}")
    pk = ctx.public_key
    summed = [
        he.rerandomize(pk, he.hom_add_plain(pk, c, y), ctx.rng)
        for c, y in zip(ctx.ciphertexts(values), y_raw)
    ]
    yield send(MsgType.VA_PERMUTED_SUM, [c.value for c in perm.apply(summed)])


# --------------------------------------------------------------------------
# scalar product via 2ab = a^2 + b^2 - (a-b)^2, computed on raw integers


def scalar_product_alice(ctx, a_raw):
    """Returns the raw product at scale ``2f`` (exact for the quantized inputs)."""
    diffs = yield from vector_add_alice(ctx, a_raw, category="permuted_difference")
    values = yield Expect(MsgType.SP_BOB_SQUARES)
    if len(values) != 1 or values[0] < 0:
        raise ValueOutOfRange("malformed square sum")
    b_sq = values[0]
    ctx.view("square_sum", b_sq)
    twice = sum(v * v for v in a_raw) + b_sq - sum(d * d for d in diffs)
    result = twice // 2
    yield send(MsgType.SP_RESULT, [result])
    return result


def scalar_product_bob(ctx, b_raw):
    perm = Permutation.random(len(b_raw), ctx.rng)  # fresh per run
    yield from vector_add_bob(ctx, [-v for v in b_raw], perm)
    yield send(MsgType.SP_BOB_SQUARES, [sum(v * v for v in b_raw)])
    values = yield Expect(MsgType.SP_RESULT)
    if len(values) != 1:
        raise LengthMismatch("scalar-product result must be a single value")
    ctx.view("stage_output", values[0])
    return values[0]


# --------------------------------------------------------------------------
# magnitude comparison


def _check_magnitude(v, bits):
    if not 0 <= v < 1 << bits:
        raise ValueOutOfRange(f"value must lie in [0, 2^{bits})")


def compare_alice(ctx, x, bits=DEFAULT_COMPARE_BITS):
    """Alice's side; returns the ordering of x relative to Bob's value."""
    _check_magnitude(x, bits)
    yield send(MsgType.MC_ENC_BITS, [ctx.encrypt((x >> i) & 1).value for i in range(bits)])
    values = yield Expect(MsgType.MC_RANDOMIZED)
    if len(values) != bits + 1:
        raise LengthMismatch(f"expected {bits + 1} comparison elements, got {len(values)}")
    cts = ctx.ciphertexts(values)
    sk = ctx.secret_key
    residues = [sk.residue_p(c) for c in cts]
    ctx.view("comparison_residue", tuple(residues))
    if residues[-1] == 0:
        order = Ordering.EQUAL
    elif any(r == 0 for r in residues[:-1]):
        order = Ordering.LESS
    else:
        order = Ordering.GREATER
    yield send(MsgType.MC_VERDICT, [int(order)])
    ctx.view("ordering", int(order))
    return order


def compare_bob(ctx, y, bits=DEFAULT_COMPARE_BITS):
    """Bob's side; returns the same ordering Alice reports (x relative to y).

    Element i (for y_i = 1) encrypts ``2*(P_y(i+1) - P_x(i+1)) + x_i`` where
    ``P_v(k) = v >> k``; it is zero exactly when x and y share the bits above
    i and x_i = 0, i.e. when position i witnesses x < y.  Positions with
    y_i = 0 get random fillers.  All of them are blinded, shuffled, and
    followed by a blinded encryption of the Hamming distance (zero iff x = y).
    """
    _check_magnitude(y, bits)
    values = yield Expect(MsgType.MC_ENC_BITS)
    if len(values) != bits:
        raise LengthMismatch(f"expected {bits} encrypted bits, got {len(values)}")
    pk = ctx.public_key
    n, n2 = pk.n, pk.n2
    rng = ctx.rng
    xs = ctx.ciphertexts(values)

    # prefix[k] = E(x >> k), built from the top bit down
    prefix = [None] * (bits + 1)
    acc = 1  # E(0) with trivial randomness; never sent as-is
    prefix[bits] = acc
    for k in range(bits - 1, -1, -1):
        acc = acc * acc % n2 * xs[k].value % n2
        prefix[k] = acc

    def blind(c):
        rho = rng.randrange(1, n)
        return he.powmod(c, rho, n2) * pk.obfuscator(rng) % n2

    elements = []
    hamming = 1
    for i in range(bits):
        yi = (y >> i) & 1
        xi = xs[i].value
        if yi:
            hamming = hamming * (1 + n) % n2 * pow(xi, -1, n2) % n2  # + (1 - x_i)
            py = y >> (i + 1)
            inv_px = pow(prefix[i + 1], -1, n2)
            c = inv_px * inv_px % n2 * xi % n2 * (1 + (2 * py % n) * n) % n2
            elements.append(blind(c))
        else:
            hamming = hamming * xi % n2  # + x_i
            elements.append(pk.encrypt(rng.randrange(1, pk.half), rng).value)
    perm = Permutation.random(bits, rng)
    yield send(MsgType.MC_RANDOMIZED, perm.apply(elements) + [blind(hamming)])
    values = yield Expect(MsgType.MC_VERDICT)
    if len(values) != 1 or values[0] not in (0, 1, 2):
        raise ValueOutOfRange(f"bad ordering verdict {values}")
    order = Ordering(values[0])
    ctx.view("ordering", int(order))
    return order


# --------------------------------------------------------------------------
# in-process driver


def run_pair(gen_a, gen_b):
    """Drive two protocol generators against each other through real frames.

    Returns ``(result_a, result_b, frames)`` where ``frames`` lists
    ``(sender_role, Frame)`` in wire order.
    """
    gens = {"A": gen_a, "B": gen_b}
    pending = {"A": None, "B": None}  # what each side is waiting for
    inbox = {"A": [], "B": []}
    results = {}
    frames = []
    feed = {"A": None, "B": None}
    started = {"A": False, "B": False}

    def advance(role):
        gen = gens[role]
        try:
            step = gen.send(feed[role]) if started[role] else next(gen)
            started[role] = True
            feed[role] = None
        except StopIteration as stop:
            results[role] = stop.value
            pending[role] = "done"
            return
        pending[role] = step

    for role in ("A", "B"):
        advance(role)
    while True:
        progressed = False
        for role, other in (("A", "B"), ("B", "A")):
            step = pending[role]
            if step == "done":
                continue
            if isinstance(step, Expect):
                if inbox[role]:
                    frame = inbox[role].pop(0)
                    if frame.msg_type != step.msg_type:
                        raise ProtocolOrderViolation(
                            f"{role} expected {step.msg_type.name}, got {frame.msg_type.name}"
                        )
                    feed[role] = frame.values()
                    advance(role)
                    progressed = True
            else:
                frame = parse_frame(Frame.of(step.msg_type, step.values).to_bytes())
                frames.append((role, frame))
                inbox[other].append(frame)
                advance(role)
                progressed = True
        if pending["A"] == "done" and pending["B"] == "done":
            return results["A"], results["B"], frames
        if not progressed:
            raise ProtocolOrderViolation("both parties are waiting: protocol deadlock")


def local_contexts(key_bits=1024, seed=0, keypair=None, frac_bits=he.DEFAULT_FRAC_BITS):
    """A matched pair of contexts sharing Alice's key, for direct protocol use."""
    keypair = keypair or he.keygen(key_bits, seed=seed)
    a = PartyContext("A", party_rng(seed, "A"), keypair.public_key, keypair, frac_bits)
    b = PartyContext("B", party_rng(seed, "B"), keypair.public_key, None, frac_bits)
    return a, b


# --------------------------------------------------------------------------
# convenience wrappers


def vector_add_protocol(x, y, perm, contexts=None):
    """Alice's output ``perm(x + y)`` for SecretVectors ``x`` (Alice) and ``y`` (Bob)."""
    a, b = contexts or local_contexts()
    out, _, _ = run_pair(vector_add_alice(a, x.raws), vector_add_bob(b, y.raws, perm))
    f = x.frac_bits
    return [he.FixedPointScalar(v, f) for v in out]


def scalar_product_protocol(a_vec, b_vec, contexts=None):
    """Both parties' copies of ``a . b`` as Fractions."""
    ca, cb = contexts or local_contexts()
    ra, rb, _ = run_pair(scalar_product_alice(ca, a_vec.raws), scalar_product_bob(cb, b_vec.raws))
    scale = 1 << (2 * a_vec.frac_bits)
    return Fraction(ra, scale), Fraction(rb, scale)


def millionaires_compare(alice_value, bob_value, bits=DEFAULT_COMPARE_BITS, contexts=None):
    """Ordering of ``alice_value`` relative to ``bob_value``, as learned by (Alice, Bob)."""
    a, b = contexts or local_contexts()
    oa, ob, _ = run_pair(compare_alice(a, alice_value, bits), compare_bob(b, bob_value, bits))
    return oa, ob
