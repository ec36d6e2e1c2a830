"""Per-party session record and the leakage auditor."""

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .. import geometry
from ..wire import PLAINTEXT_TYPES, MsgType

# decrypted or received values a party is allowed to hold
ALLOWED_VIEWS = frozenset(
    {
        "parameters",  # handshake values
        "public_key",
        "permuted_difference",  # pi(a - b) inside a scalar product
        "permuted_sum",  # pi(x + y) from a bare vector addition
        "square_sum",  # the other side's sum of squares inside a scalar product
        "stage_output",  # scalar-product outputs of the ratio pipeline
        "squared_ratio",
        "sign",  # the peer's own coordinate sign on one axis
        "ordering",
        "comparison_residue",  # blinded comparison elements (zero or random)
        "verdict",
    }
)


@dataclass(frozen=True)
class FrameRecord:
    direction: str  # "sent" | "recv"
    msg_type: str
    digest: str
    size: int
    values: tuple | None = None  # plaintext-carrying types only

    def to_json(self):
        data = {"dir": self.direction, "type": self.msg_type, "sha256": self.digest, "size": self.size}
        if self.values is not None:
            data["values"] = [str(v) for v in self.values]
        return data


@dataclass
class Transcript:
    """Append-only log of one party's frames and decrypted views."""

    role: str
    frames: list = field(default_factory=list)
    views: list = field(default_factory=list)  # (category, value)

    def record(self, direction, frame):
        values = None
        if frame.msg_type in PLAINTEXT_TYPES:
            values = tuple(frame.values())
        elif frame.msg_type == MsgType.ABORT:
            values = frame.abort_info()
        self.frames.append(FrameRecord(direction, frame.msg_type.name, frame.digest, frame.size, values))

    def view(self, category, value):
        self.views.append((category, value))

    @property
    def bytes_sent(self):
        return sum(r.size for r in self.frames if r.direction == "sent")

    @property
    def bytes_received(self):
        return sum(r.size for r in self.frames if r.direction == "recv")

    def count(self, direction):
        return sum(1 for r in self.frames if r.direction == direction)

    def to_jsonl(self):
        return "".join(json.dumps(r.to_json(), sort_keys=True) + "\n" for r in self.frames)

    def dump(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_jsonl())


# --------------------------------------------------------------------------
# auditing


@dataclass(frozen=True)
class Violation:
    role: str
    source: str  # "view" or "frame"
    category: str
    reason: str


@dataclass
class AuditReport:
    violations: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self):
        return not self.violations

    def __len__(self):
        return len(self.violations)


def _raw(q, bits):
    return round(Fraction(q) * (1 << bits))


@dataclass
class SecretRecord:
    """Everything about one party that its peer must never see.

    ``vertices`` are the hull, ``submitted`` the points the party fed to the
    direction protocol (one per iteration), ``magnitudes`` the squared lengths
    of the per-iteration sums (filled in by ``audit_session``).
    """

    vertices: list = field(default_factory=list)
    submitted: list = field(default_factory=list)
    magnitudes: list = field(default_factory=list)

    def forbidden(self, frac_bits):
        values = set()
        for p in list(self.vertices) + list(self.submitted):
            for c in p:
                for bits in (frac_bits, 2 * frac_bits):
                    values.add(abs(_raw(c, bits)))
        for r2 in self.magnitudes:
            r = geometry.sqrt_approx(r2, 2 * frac_bits)
            for q in (r2, r):
                for bits in (frac_bits, 2 * frac_bits):
                    values.add(abs(_raw(q, bits)))
        values.discard(0)
        return values


def _ints(value):
    if isinstance(value, bool):
        return []
    if isinstance(value, int):
        return [value]
    if isinstance(value, (tuple, list)):
        out = []
        for v in value:
            out.extend(_ints(v))
        return out
    return []


def audit_transcript(transcript, peer_secrets, frac_bits, policy=ALLOWED_VIEWS):
    """Check one party's transcript against its peer's secrets.

    A view entry violates the policy when its category is not allowed or any
    integer in it equals a raw (scale 2^f or 2^2f) encoding of a peer
    coordinate, submitted point, or sum magnitude.  Received plaintext frames
    get the same numeric check.  One violation per offending entry.
    """
    report = AuditReport()
    forbidden = peer_secrets.forbidden(frac_bits)
    for category, value in transcript.views:
        report.checked += 1
        if category not in policy:
            report.violations.append(Violation(transcript.role, "view", category, "category not allowed"))
        elif any(abs(v) in forbidden for v in _ints(value)):
            report.violations.append(Violation(transcript.role, "view", category, "peer secret value"))
    for rec in transcript.frames:
        if rec.direction != "recv" or rec.values is None or rec.msg_type == "ABORT":
            continue
        report.checked += 1
        if any(abs(v) in forbidden for v in _ints(rec.values)):
            report.violations.append(Violation(transcript.role, "frame", rec.msg_type, "peer secret value"))
    return report


def audit_session(transcripts, secrets, frac_bits, policy=ALLOWED_VIEWS):
    """Audit both sides; ``transcripts`` and ``secrets`` are dicts keyed by role."""
    report = AuditReport()
    sums = [geometry.add(a, b) for a, b in zip(secrets["A"].submitted, secrets["B"].submitted)]
    for rec in secrets.values():
        rec.magnitudes = [geometry.dot(s, s) for s in sums]
    for role, peer in (("A", "B"), ("B", "A")):
        part = audit_transcript(transcripts[role], secrets[peer], frac_bits, policy)
        report.violations.extend(part.violations)
        report.checked += part.checked
    return report
