"""Direction-only disclosure of a two-party vector sum.

Party A holds ``X = (x1, y1, z1)``, party B holds ``Y = (x2, y2, z2)``.  Both
learn the unit vector along ``X + Y`` and nothing that pins down its length:

* per-axis signs of the sum, from each party's own sign plus a magnitude
  comparison when the signs disagree;
* ``tan^2(phi) = ((y1+y2)/(x1+x2))^2`` and the two terms of
  ``tan^2(theta) = ((x1+x2)^2 + (y1+y2)^2)/(z1+z2)^2``, each from a two-stage
  scalar-product pipeline run under an axis relabelling.

Stage one yields ``(den1+den2)^2 / (num1 aux1 num2 aux2)^2``; both parties
invert it and feed the inverse into stage two, whose output is the squared
ratio.  Each party scales its inputs by a private power of two (so its largest
entry sits in [1, 2)) and by a public ``2**BOOST``; the private factors cancel
between the stages and the public one is divided out.
"""

import enum
from dataclasses import dataclass
from fractions import Fraction

from . import geometry, he, mpc
from .errors import (
    AllZeroSum,
    DegenerateDenominator,
    EncodingOverflow,
    ProtocolOrderViolation,
    ValueOutOfRange,
    ZeroCoordinate,
)
from .wire import Expect, MsgType, send

BOOST = 24
DEGENERATE_EXP = BOOST - 62  # stage-one outputs below 2**this are treated as zero
SQRT_BITS = 64


class Axis(enum.IntEnum):
    X = 0
    Y = 1
    Z = 2


class Sign(enum.IntEnum):
    NEGATIVE = -1
    ZERO = 0
    POSITIVE = 1


PHI_AXES = (Axis.Y, Axis.X, Axis.Z)  # num, den, aux
THETA_X_AXES = (Axis.X, Axis.Z, Axis.Y)
THETA_Y_AXES = (Axis.Y, Axis.Z, Axis.X)


@dataclass(frozen=True)
class PrivateVec3:
    x: Fraction
    y: Fraction
    z: Fraction

    @classmethod
    def of(cls, v):
        return cls(*geometry.as_point(v))

    def __getitem__(self, axis):
        return (self.x, self.y, self.z)[axis]

    @property
    def vec(self):
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class RatioResult:
    value: Fraction

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("squared ratio cannot be negative")


@dataclass(frozen=True)
class AxisSign:
    axis: Axis
    sign: Sign


@dataclass(frozen=True)
class ResolvedDirection:
    tan_phi_sq: Fraction | None  # None: x-sum zero or numerically degenerate
    tan_theta_sq: Fraction | None  # None: z-sum zero or numerically degenerate
    signs: tuple
    unit: geometry.SphericalDirection


# --------------------------------------------------------------------------
# local algebra


def stage_one_inputs(role, v, axes):
    """Exact stage-one entries for ``role`` ("A" or "B") under ``axes = (num, den, aux)``."""
    num, den, aux = (v[a] for a in axes)
    if num == 0 or den == 0 or aux == 0:
        raise ZeroCoordinate("stage-one inputs need nonzero coordinates")
    w = 1 / (num * num * aux * aux)
    if role == "A":
        return (den * den * w, w, 2 * den * w)
    return (w, den * den * w, den * w)


def stage_two_inputs(role, v, axes, inv):
    """Exact stage-two entries given the inverted stage-one output ``inv``."""
    num, _, aux = (v[a] for a in axes)
    a2 = aux * aux
    if role == "A":
        return (inv / (num * num * a2), 1 / a2, inv / (num * a2))
    return (1 / a2, inv / (num * num * a2), 2 / (num * a2))


def pow2_normalizer(values):
    """Power of two ``s`` with ``max|v| * s`` in [1, 2)."""
    top = max(abs(Fraction(v)) for v in values)
    if top == 0:
        raise ZeroCoordinate("cannot normalise an all-zero vector")
    e = top.numerator.bit_length() - top.denominator.bit_length()
    if Fraction(1 << max(e, 0), 1 << max(-e, 0)) > top:
        e -= 1
    return Fraction(1 << max(-e, 0), 1 << max(e, 0))


def _quantize(values, factor, f):
    try:
        return [he.encode_fixed(v * factor, f).raw for v in values]
    except EncodingOverflow as exc:
        raise ValueOutOfRange(f"conditioned ratio input too large: {exc}") from None


def _raw_sign(v, f):
    raw = he.encode_fixed(v, f).raw
    return (raw > 0) - (raw < 0), abs(raw)


# --------------------------------------------------------------------------
# protocol generators (role taken from ctx.role; A is the key holder)


def _scalar_product(ctx, raws):
    if ctx.role == "A":
        result = yield from mpc.scalar_product_alice(ctx, raws)
        ctx.view("stage_output", result)
        return result
    return (yield from mpc.scalar_product_bob(ctx, raws))


def _header(ctx, msg_type, values):
    """A announces the step, B checks it is the step it expects."""
    if ctx.role == "A":
        yield send(msg_type, values)
        return
    got = yield Expect(msg_type)
    if list(got) != list(values):
        raise ProtocolOrderViolation(f"peer is at step {got}, expected {list(values)}")


def ratio_protocol(ctx, v, axes):
    """Squared ratio ``(num_sum / den_sum)**2`` for this party's vector ``v``."""
    f = ctx.frac_bits
    boost = Fraction(1 << BOOST)
    codes = [int(a) for a in axes]

    yield from _header(ctx, MsgType.DIR_STAGE1, codes)
    stage1 = stage_one_inputs(ctx.role, v, axes)
    private = pow2_normalizer(stage1)
    raw = yield from _scalar_product(ctx, _quantize(stage1, private * boost, f))
    s1 = Fraction(raw, 1 << (2 * f)) / (boost * boost)
    if s1 < Fraction(1, 1 << -DEGENERATE_EXP):
        raise DegenerateDenominator(f"stage-one output {float(s1):.3g} is indistinguishable from zero")
    inv = 1 / s1

    yield from _header(ctx, MsgType.DIR_STAGE2, codes)
    stage2 = stage_two_inputs(ctx.role, v, axes, inv)
    raw = yield from _scalar_product(ctx, _quantize(stage2, private * boost, f))
    t = max(Fraction(raw, 1 << (2 * f)) / (boost * boost), Fraction(0))
    ctx.view("squared_ratio", t)
    return RatioResult(t)


def sign_of_sum(ctx, v, axis):
    f = ctx.frac_bits
    own, magnitude = _raw_sign(v[axis], f)
    if ctx.role == "A":
        yield send(MsgType.DIR_SIGN, [int(axis), own])
        got = yield Expect(MsgType.DIR_SIGN)
    else:
        got = yield Expect(MsgType.DIR_SIGN)
        yield send(MsgType.DIR_SIGN, [int(axis), own])
    if len(got) != 2 or got[0] != int(axis) or got[1] not in (-1, 0, 1):
        raise ProtocolOrderViolation(f"malformed sign message {got} for axis {axis.name}")
    peer = got[1]
    ctx.view("sign", peer)
    sign_a, sign_b = (own, peer) if ctx.role == "A" else (peer, own)
    if sign_a == sign_b or sign_b == 0:
        result = sign_a
    elif sign_a == 0:
        result = sign_b
    else:
        bits = f + 61
        if ctx.role == "A":
            order = yield from mpc.compare_alice(ctx, magnitude, bits)
        else:
            order = yield from mpc.compare_bob(ctx, magnitude, bits)
        result = {mpc.Ordering.GREATER: sign_a, mpc.Ordering.LESS: sign_b}.get(order, 0)
    return AxisSign(axis, Sign(result))


def direction_protocol(ctx, v):
    """Full run: signs, then the ratio runs the signs leave meaningful.

    Every skip and degenerate outcome is decided from values both parties
    hold, so the two sides always take the same branch.
    """
    v = v if isinstance(v, PrivateVec3) else PrivateVec3.of(v)
    signs = []
    for axis in Axis:
        signs.append((yield from sign_of_sum(ctx, v, axis)))
    sx, sy, sz = (s.sign for s in signs)
    if sx == sy == sz == Sign.ZERO:
        raise AllZeroSum("every axis of the sum is zero")

    t_phi = None
    phi_degenerate = False
    if sx != Sign.ZERO and sy != Sign.ZERO:
        try:
            t_phi = (yield from ratio_protocol(ctx, v, PHI_AXES)).value
        except DegenerateDenominator:
            phi_degenerate = True

    theta_parts = []
    theta_degenerate = False
    if sz != Sign.ZERO:
        for num_sign, axes in ((sx, THETA_X_AXES), (sy, THETA_Y_AXES)):
            if num_sign == Sign.ZERO or theta_degenerate:
                continue
            try:
                theta_parts.append((yield from ratio_protocol(ctx, v, axes)).value)
            except DegenerateDenominator:
                theta_degenerate = True
    t_theta = None if sz == Sign.ZERO or theta_degenerate else sum(theta_parts, Fraction(0))
    return resolve_direction(signs, t_phi, t_theta, phi_degenerate, theta_degenerate)


# --------------------------------------------------------------------------
# reconstruction


def _sqrt(q):
    return geometry.sqrt_approx(q, SQRT_BITS)


def resolve_direction(signs, t_phi, t_theta, phi_degenerate=False, theta_degenerate=False):
    """Unit vector from per-axis signs and squared tangents.

    ``u = (sin t cos p, sin t sin p, cos t)`` with theta in [0, pi].  A ZERO
    sign or a degenerate ratio pins the matching angle: a zero x-sum gives
    cos(phi) = 0, a zero z-sum gives cos(theta) = 0, and so on.
    """
    by_axis = {s.axis: int(s.sign) for s in signs}
    sx, sy, sz = by_axis[Axis.X], by_axis[Axis.Y], by_axis[Axis.Z]
    if sx == sy == sz == 0:
        raise AllZeroSum("every axis of the sum is zero")

    one = Fraction(1)
    if sx == 0 and sy == 0:
        cos_p = sin_p = Fraction(0)
    elif sx == 0 or phi_degenerate:
        cos_p, sin_p = Fraction(0), Fraction(sy)
    elif sy == 0:
        cos_p, sin_p = Fraction(sx), Fraction(0)
    else:
        cos_p = sx * _sqrt(one / (1 + t_phi))
        sin_p = sy * _sqrt(t_phi / (1 + t_phi))

    if sz == 0 or theta_degenerate:
        sin_t, cos_t = one, Fraction(0)
    elif sx == 0 and sy == 0:
        sin_t, cos_t = Fraction(0), Fraction(sz)
    else:
        sin_t = _sqrt(t_theta / (1 + t_theta))
        cos_t = sz * _sqrt(one / (1 + t_theta))

    unit = geometry.SphericalDirection(sin_t * cos_p, sin_t * sin_p, cos_t)
    if sx and sy and phi_degenerate:
        t_phi = None
    return ResolvedDirection(t_phi, t_theta, tuple(signs), unit)


# --------------------------------------------------------------------------
# convenience wrapper


def run_direction(v_a, v_b, contexts=None):
    """Run the full direction protocol in-process; returns (A's result, B's result)."""
    a, b = contexts or mpc.local_contexts()
    ra, rb, _ = mpc.run_pair(direction_protocol(a, v_a), direction_protocol(b, v_b))
    return ra, rb


def run_ratio(v_a, v_b, axes=PHI_AXES, contexts=None):
    a, b = contexts or mpc.local_contexts()
    ra, rb, _ = mpc.run_pair(
        ratio_protocol(a, PrivateVec3.of(v_a), axes), ratio_protocol(b, PrivateVec3.of(v_b), axes)
    )
    return ra, rb
