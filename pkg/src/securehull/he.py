"""Additively homomorphic encryption (Paillier over Z_{n^2}, generator n+1) and
fixed-point encoding of rationals into the plaintext ring.

Encryption uses the short-exponent obfuscator ``hs**a`` with ``hs = h**n`` for
a fixed ``h = -x**2 mod n``; a windowed fixed-base table makes that a handful of
multiplications instead of a full-length exponentiation.
"""

import base64
import hashlib
import json
import random
import secrets
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2

from .errors import EncodingOverflow, KeyMismatch, UnsupportedKeySize
from .kernels import FixedBaseTable, powmod

SUPPORTED_KEY_BITS = (1024, 2048, 3072)
DEFAULT_KEY_BITS = 2048
DEFAULT_FRAC_BITS = 32
ENCODE_LIMIT_BITS = 60

_SYSTEM_RNG = secrets.SystemRandom()


def _fingerprint(n):
    return hashlib.sha256(n.to_bytes((n.bit_length() + 7) // 8, "big")).hexdigest()[:16]


# --------------------------------------------------------------------------
# keys


@dataclass(frozen=True)
class PublicKey:
    n: int
    hs: int
    key_bits: int

    @property
    def n2(self):
        return self.n * self.n

    @property
    def key_id(self):
        return _fingerprint(self.n)

    @property
    def half(self):
        return self.n // 2

    def _table(self):
        table = self.__dict__.get("_fb")
        if table is None:
            table = FixedBaseTable(self.hs, self.n2, self.obfuscator_bits)
            object.__setattr__(self, "_fb", table)
        return table

    @property
    def obfuscator_bits(self):
        return (self.key_bits + 1) // 2

    def obfuscator(self, rng=None):
        rng = rng or _SYSTEM_RNG
        return self._table().pow(rng.getrandbits(self.obfuscator_bits))

    def encode(self, m):
        """Signed integer -> plaintext ring (negatives occupy the upper half)."""
        if not -self.half <= m <= self.half:
            raise EncodingOverflow(f"{m.bit_length()}-bit value does not fit the plaintext ring")
        return m % self.n

    def decode(self, x):
        return x - self.n if x > self.half else x

    def encrypt(self, m, rng=None):
        """Encrypt a signed integer; ``rng`` is any object with ``getrandbits``."""
        g_m = (1 + self.encode(m) * self.n) % self.n2
        return Ciphertext(g_m * self.obfuscator(rng) % self.n2, self.key_id)

    def to_json(self):
        return {"key_bits": self.key_bits, "n": _b64(self.n), "hs": _b64(self.hs)}

    @classmethod
    def from_json(cls, data):
        return cls(_unb64(data["n"]), _unb64(data["hs"]), int(data["key_bits"]))


@dataclass(frozen=True)
class SecretKey:
    public: PublicKey
    p: int
    q: int
    _crt: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p, q, n = self.p, self.q, self.public.n
        if p * q != n:
            raise KeyMismatch("secret primes do not match the public modulus")
        pp, qq = p * p, q * q
        hp = pow((powmod(n + 1, p - 1, pp) - 1) // p, -1, p)
        hq = pow((powmod(n + 1, q - 1, qq) - 1) // q, -1, q)
        object.__setattr__(self, "_crt", (pp, qq, hp, hq, pow(q, -1, p)))

    def _half(self, c, prime, square, h):
        return (powmod(c % square, prime - 1, square) - 1) // prime * h % prime

    def _check(self, c):
        if c.key_id != self.public.key_id:
            raise KeyMismatch("ciphertext was produced under a different key")

    def decrypt_raw(self, c):
        """Plaintext ring element in [0, n)."""
        self._check(c)
        pp, qq, hp, hq, q_inv = self._crt
        mp = self._half(c.value, self.p, pp, hp)
        mq = self._half(c.value, self.q, qq, hq)
        return mq + (mp - mq) * q_inv % self.p * self.q

    def decrypt(self, c):
        """Signed plaintext."""
        return self.public.decode(self.decrypt_raw(c))

    def residue_p(self, c):
        """Plaintext mod p: half the cost of a full decryption."""
        self._check(c)
        pp, _, hp, _, _ = self._crt
        return self._half(c.value, self.p, pp, hp)

    def is_zero(self, c):
        """Zero test on the mod-p residue.

        A nonzero plaintext is misreported only when it is divisible by p,
        which a party without the factorisation cannot arrange.
        """
        return self.residue_p(c) == 0


@dataclass(frozen=True)
class HEKeyPair:
    public_key: PublicKey
    secret_key: SecretKey

    @property
    def key_bits(self):
        return self.public_key.key_bits

    def to_json(self):
        data = self.public_key.to_json()
        data["p"] = _b64(self.secret_key.p)
        data["q"] = _b64(self.secret_key.q)
        return data

    @classmethod
    def from_json(cls, data):
        pk = PublicKey.from_json(data)
        return cls(pk, SecretKey(pk, _unb64(data["p"]), _unb64(data["q"])))

    def dump(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _b64(x):
    return base64.b64encode(x.to_bytes((x.bit_length() + 7) // 8 or 1, "big")).decode("ascii")


def _unb64(s):
    return int.from_bytes(base64.b64decode(s), "big")


def _random_prime(bits, rng):
    while True:
        cand = rng.getrandbits(bits) | (3 << (bits - 2)) | 1
        if gmpy2.is_prime(cand, 40):
            return cand


def keygen(key_bits=DEFAULT_KEY_BITS, seed=None):
    """Generate a keypair; deterministic when ``seed`` is given (test mode)."""
    if key_bits not in SUPPORTED_KEY_BITS:
        raise UnsupportedKeySize(f"key size {key_bits} not in {SUPPORTED_KEY_BITS}")
    rng = random.Random(f"securehull-keygen:{seed}") if seed is not None else _SYSTEM_RNG
    half = key_bits // 2
    while True:
        p = _random_prime(half, rng)
        q = _random_prime(half, rng)
        if p != q and (p * q).bit_length() == key_bits:
            break
    if p < q:
        p, q = q, p
    n = p * q
    n2 = n * n
    while True:
        x = rng.randrange(2, n)
        if gmpy2.gcd(x, n) == 1:
            break
    hs = powmod((-x * x) % n, n, n2)
    pk = PublicKey(n, hs, key_bits)
    return HEKeyPair(pk, SecretKey(pk, p, q))


# --------------------------------------------------------------------------
# ciphertexts


@dataclass(frozen=True)
class Ciphertext:
    value: int
    key_id: str


def _same_key(pk, *cs):
    for c in cs:
        if c.key_id != pk.key_id:
            raise KeyMismatch("ciphertexts under different keys cannot be combined")


def encrypt(pk, m, rng=None):
    return pk.encrypt(m, rng)


def decrypt(sk, c):
    return sk.decrypt(c)


def hom_add(pk, c1, c2):
    """E(a), E(b) -> E(a+b)."""
    _same_key(pk, c1, c2)
    return Ciphertext(c1.value * c2.value % pk.n2, pk.key_id)


def hom_add_plain(pk, c, m):
    _same_key(pk, c)
    return Ciphertext(c.value * (1 + pk.encode(m) * pk.n) % pk.n2, pk.key_id)


def hom_scale(pk, c, k):
    """E(a) -> E(k*a) for a public integer k (any sign)."""
    _same_key(pk, c)
    return Ciphertext(powmod(c.value, k % pk.n, pk.n2), pk.key_id)


def hom_neg(pk, c):
    _same_key(pk, c)
    return Ciphertext(pow(c.value, -1, pk.n2), pk.key_id)


def rerandomize(pk, c, rng=None):
    _same_key(pk, c)
    return Ciphertext(c.value * pk.obfuscator(rng) % pk.n2, pk.key_id)


# --------------------------------------------------------------------------
# fixed point


@dataclass(frozen=True)
class FixedPointScalar:
    raw: int
    frac_bits: int = DEFAULT_FRAC_BITS

    def __post_init__(self):
        if abs(self.raw) >= 1 << (self.frac_bits + ENCODE_LIMIT_BITS):
            raise EncodingOverflow("raw value outside the fixed-point headroom")

    @property
    def value(self):
        return Fraction(self.raw, 1 << self.frac_bits)


def encode_fixed(q, f=DEFAULT_FRAC_BITS):
    q = Fraction(q)
    if abs(q) >= 1 << ENCODE_LIMIT_BITS:
        raise EncodingOverflow(f"|{float(q):.3g}| exceeds 2^{ENCODE_LIMIT_BITS}")
    return FixedPointScalar(round(q * (1 << f)), f)  # Fraction.__round__ is half-to-even


def decode_fixed(s):
    return s.value
