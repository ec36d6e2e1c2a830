"""Message vocabulary, payload codec and frame layout shared by every protocol layer.

A frame is ``length(4, big-endian) | version(1) | msg_type(1) | payload`` where
``length`` counts the version and type bytes plus the payload.  Payloads are
a 4-byte count followed by that many length-prefixed signed big-endian ints;
ABORT frames carry UTF-8 JSON instead.

Protocol steps are written as generators that yield :class:`Send` and
:class:`Expect` instructions, so the same code runs under any transport.
"""

import enum
import hashlib
import json
import struct
from dataclasses import dataclass

from .errors import MalformedFrame, VersionMismatch

VERSION = 0x01
MAX_FRAME = 1 << 20
_HEADER = struct.Struct(">IBB")


class MsgType(enum.IntEnum):
    HELLO = 0x01
    HELLO_ACK = 0x02
    VA_PUBKEY = 0x10
    VA_ENC_VECTOR = 0x11
    VA_PERMUTED_SUM = 0x12
    SP_BOB_SQUARES = 0x13
    SP_RESULT = 0x14
    MC_ENC_BITS = 0x20
    MC_RANDOMIZED = 0x21
    MC_VERDICT = 0x22
    DIR_STAGE1 = 0x30
    DIR_STAGE2 = 0x31
    DIR_SIGN = 0x32
    VERDICT = 0x40
    ABORT = 0x7F


# message types whose integers are plaintext values (not ciphertexts); their
# contents are kept in transcripts so the auditor can inspect them
PLAINTEXT_TYPES = frozenset(
    {
        MsgType.HELLO,
        MsgType.HELLO_ACK,
        MsgType.SP_BOB_SQUARES,
        MsgType.SP_RESULT,
        MsgType.MC_VERDICT,
        MsgType.DIR_STAGE1,
        MsgType.DIR_STAGE2,
        MsgType.DIR_SIGN,
        MsgType.VERDICT,
    }
)


@dataclass(frozen=True)
class Send:
    msg_type: MsgType
    values: tuple


@dataclass(frozen=True)
class Expect:
    msg_type: MsgType


def send(msg_type, values):
    return Send(MsgType(msg_type), tuple(values))


# --------------------------------------------------------------------------
# payloads


def encode_ints(values):
    out = [struct.pack(">I", len(values))]
    for v in values:
        raw = v.to_bytes((v.bit_length() + 8) // 8, "big", signed=True) if v else b""
        out.append(struct.pack(">I", len(raw)))
        out.append(raw)
    return b"".join(out)


def decode_ints(payload):
    try:
        (count,) = struct.unpack_from(">I", payload, 0)
        pos = 4
        values = []
        for _ in range(count):
            (size,) = struct.unpack_from(">I", payload, pos)
            pos += 4
            if pos + size > len(payload):
                raise MalformedFrame("integer runs past end of payload")
            values.append(int.from_bytes(payload[pos : pos + size], "big", signed=True))
            pos += size
    except struct.error as exc:
        raise MalformedFrame(f"truncated payload: {exc}") from None
    if pos != len(payload):
        raise MalformedFrame("trailing bytes after payload")
    return values


# --------------------------------------------------------------------------
# frames


@dataclass(frozen=True)
class Frame:
    msg_type: MsgType
    payload: bytes
    version: int = VERSION

    @classmethod
    def of(cls, msg_type, values):
        return cls(MsgType(msg_type), encode_ints(list(values)))

    @classmethod
    def abort(cls, error, detail=""):
        body = json.dumps({"error": error, "detail": detail}, sort_keys=True)
        return cls(MsgType.ABORT, body.encode())

    def to_bytes(self):
        return _HEADER.pack(len(self.payload) + 2, self.version, self.msg_type) + self.payload

    def values(self):
        return decode_ints(self.payload)

    def abort_info(self):
        try:
            info = json.loads(self.payload.decode())
            return str(info["error"]), str(info.get("detail", ""))
        except (ValueError, KeyError, TypeError) as exc:
            raise MalformedFrame(f"bad abort payload: {exc}") from None

    @property
    def digest(self):
        return hashlib.sha256(self.to_bytes()).hexdigest()

    @property
    def size(self):
        return len(self.payload) + _HEADER.size


def parse_header(header):
    """``(payload_length, version, msg_type)`` from the 6 header bytes, validated."""
    if len(header) != _HEADER.size:
        raise MalformedFrame("short frame header")
    length, version, msg_type = _HEADER.unpack(header)
    if length < 2:
        raise MalformedFrame(f"frame length {length} below minimum")
    if length - 2 > MAX_FRAME:
        raise MalformedFrame(f"frame of {length - 2} bytes exceeds the {MAX_FRAME}-byte cap")
    if version != VERSION:
        raise VersionMismatch(f"peer speaks frame version {version}, expected {VERSION}")
    try:
        kind = MsgType(msg_type)
    except ValueError:
        raise MalformedFrame(f"unknown message type 0x{msg_type:02x}") from None
    return length - 2, version, kind


def parse_frame(data):
    """Parse exactly one serialized frame."""
    size, version, kind = parse_header(data[: _HEADER.size])
    payload = data[_HEADER.size :]
    if len(payload) != size:
        raise MalformedFrame(f"declared {size} payload bytes, got {len(payload)}")
    return Frame(kind, bytes(payload), version)
