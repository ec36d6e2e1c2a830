"""Two-party session engine: state machine, transports, transcripts and audit."""

from .config import SessionConfig
from .party import EPSILON, PartyState, Phase, poll, public_offset
from .transcript import ALLOWED_VIEWS, AuditReport, SecretRecord, Transcript, audit_session, audit_transcript
from .transport import (
    QueueChannel,
    SessionResult,
    SocketChannel,
    connect,
    drive,
    run_memory,
    run_session,
    run_tcp_loopback,
    run_threaded,
    serve,
)

__all__ = [
    "ALLOWED_VIEWS",
    "AuditReport",
    "EPSILON",
    "PartyState",
    "Phase",
    "QueueChannel",
    "SecretRecord",
    "SessionConfig",
    "SessionResult",
    "SocketChannel",
    "Transcript",
    "audit_session",
    "audit_transcript",
    "connect",
    "drive",
    "poll",
    "public_offset",
    "run_memory",
    "run_session",
    "run_tcp_loopback",
    "run_threaded",
    "serve",
]
