"""Frame transports and session drivers (in-memory, threaded queues, TCP)."""

import collections
import queue
import socket
import threading
import time
from dataclasses import dataclass

from ..errors import RemoteAbort, SecureHullError, Timeout, TransportError
from ..wire import _HEADER, Frame, parse_header
from .config import SessionConfig
from .party import PartyState, poll

# --------------------------------------------------------------------------
# channels


class QueueChannel:
    """One endpoint of an in-process duplex pipe."""

    def __init__(self, inbox, outbox, timeout=30.0):
        self._in, self._out, self.timeout = inbox, outbox, timeout

    @classmethod
    def pair(cls, timeout=30.0):
        a, b = queue.Queue(), queue.Queue()
        return cls(a, b, timeout), cls(b, a, timeout)

    def send(self, frame):
        self._out.put(frame.to_bytes())

    def recv(self):
        try:
            data = self._in.get(timeout=self.timeout)
        except queue.Empty:
            raise Timeout(f"no frame within {self.timeout:.1f} s") from None
        if data is None:
            raise TransportError("channel closed by peer")
        size, version, kind = parse_header(data[: _HEADER.size])
        return Frame(kind, data[_HEADER.size :], version)

    def close(self):
        self._out.put(None)


class SocketChannel:
    def __init__(self, sock, timeout=30.0):
        self.sock = sock
        self.timeout = timeout
        sock.settimeout(timeout)

    def _read(self, n):
        buf = bytearray()
        while len(buf) < n:
            try:
                chunk = self.sock.recv(n - len(buf))
            except socket.timeout:
                raise Timeout(f"no data within {self.timeout:.1f} s") from None
            except OSError as exc:
                raise TransportError(f"receive failed: {exc}") from None
            if not chunk:
                raise TransportError("connection closed by peer")
            buf.extend(chunk)
        return bytes(buf)

    def send(self, frame):
        try:
            self.sock.sendall(frame.to_bytes())
        except socket.timeout:
            raise Timeout("send timed out") from None
        except OSError as exc:
            raise TransportError(f"send failed: {exc}") from None

    def recv(self):
        size, version, kind = parse_header(self._read(_HEADER.size))
        return Frame(kind, self._read(size) if size else b"", version)

    def close(self):
        try:
            self.sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self.sock.close()


# --------------------------------------------------------------------------
# drivers


def _send_all(channel, frames):
    for f in frames:
        channel.send(f)


def drive(state, channel):
    """Run one party to completion over ``channel``; returns its verdict."""
    try:
        _, out, _ = poll(state)
        _send_all(channel, out)
        while not state.done:
            frame = channel.recv()
            _, out, _ = poll(state, frame)
            _send_all(channel, out)
    except TransportError:
        raise
    except SecureHullError as exc:
        # raised by poll itself (bad frame or the peer's abort): tell the peer
        # unless it is the one that aborted
        if not _received_abort(state):
            try:
                channel.send(Frame.abort(type(exc).__name__, str(exc)))
            except TransportError:
                pass
        raise
    if state.error is not None:
        raise state.error
    return state.verdict


def _received_abort(state):
    recs = state.transcript.frames
    return bool(recs) and recs[-1].direction == "recv" and recs[-1].msg_type == "ABORT"


@dataclass
class SessionResult:
    verdict_a: object
    verdict_b: object
    state_a: PartyState
    state_b: PartyState
    wall_ms: float

    @property
    def verdict(self):
        return self.verdict_a

    @property
    def transcripts(self):
        return {"A": self.state_a.transcript, "B": self.state_b.transcript}

    @property
    def secrets(self):
        return {"A": self.state_a.secrets, "B": self.state_b.secrets}


def run_memory(state_a, state_b):
    """Sequential in-process run: both state machines on the calling thread."""
    states = {"A": state_a, "B": state_b}
    inbox = {"A": collections.deque(), "B": collections.deque()}
    other = {"A": "B", "B": "A"}

    def route(role, frames):
        for f in frames:  # serialize and reparse so both sides see wire bytes
            data = f.to_bytes()
            size, version, kind = parse_header(data[: _HEADER.size])
            inbox[other[role]].append(Frame(kind, data[_HEADER.size :], version))

    for role in ("A", "B"):
        _, out, _ = poll(states[role])
        route(role, out)
    while not (state_a.done and state_b.done):
        progressed = False
        for role in ("A", "B"):
            st = states[role]
            if st.done or not inbox[role]:
                continue
            _, out, _ = poll(st, inbox[role].popleft())
            route(role, out)
            progressed = True
            if st.error is not None:
                raise st.error
        if not progressed:
            raise TransportError("both parties are waiting for each other")
    return state_a.verdict, state_b.verdict


def run_threaded(state_a, state_b, timeout=30.0):
    ca, cb = QueueChannel.pair(timeout)
    return _run_two_threads(state_a, state_b, ca, cb)


def _run_two_threads(state_a, state_b, chan_a, chan_b):
    results = {}

    def worker(role, st, ch):
        try:
            results[role] = drive(st, ch)
        except BaseException as exc:  # reported below
            results[role] = exc

    tb = threading.Thread(target=worker, args=("B", state_b, chan_b), daemon=True)
    tb.start()
    worker("A", state_a, chan_a)
    tb.join()
    for role in ("A", "B"):
        if isinstance(results.get(role), BaseException):
            origin = results[role]
            peer = results.get("B" if role == "A" else "A")
            if isinstance(origin, RemoteAbort) and isinstance(peer, BaseException):
                raise peer
            raise origin
    return results["A"], results["B"]


def run_tcp_loopback(state_a, state_b, timeout=30.0):
    """Both parties in this process, talking over a real loopback socket."""
    server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    server.bind(("127.0.0.1", 0))
    server.listen(1)
    port = server.getsockname()[1]
    box = {}

    def accept():
        conn, _ = server.accept()
        box["chan"] = SocketChannel(conn, timeout)

    t = threading.Thread(target=accept, daemon=True)
    t.start()
    client = socket.create_connection(("127.0.0.1", port), timeout=timeout)
    t.join()
    server.close()
    chan_a, chan_b = box["chan"], SocketChannel(client, timeout)
    try:
        return _run_two_threads(state_a, state_b, chan_a, chan_b)
    finally:
        chan_a.close()
        chan_b.close()


def serve(state, host, port, timeout=30.0, ready=None):
    """Accept one connection and run ``state`` over it."""
    server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    server.bind((host, port))
    server.listen(1)
    server.settimeout(timeout)
    if ready is not None:
        ready(server.getsockname())
    try:
        conn, _ = server.accept()
    except socket.timeout:
        raise Timeout(f"no connection within {timeout:.1f} s") from None
    finally:
        server.close()
    chan = SocketChannel(conn, timeout)
    try:
        return drive(state, chan)
    finally:
        chan.close()


def connect(state, host, port, timeout=30.0, retries=50):
    last = None
    for _ in range(retries):
        try:
            sock = socket.create_connection((host, port), timeout=timeout)
            break
        except OSError as exc:
            last = exc
            time.sleep(0.1)
    else:
        raise TransportError(f"cannot connect to {host}:{port}: {last}")
    chan = SocketChannel(sock, timeout)
    try:
        return drive(state, chan)
    finally:
        chan.close()


# --------------------------------------------------------------------------
# one-call session


def run_session(hull_a, hull_b, config=None, keypair=None, kind="memory"):
    """Run both parties of a session locally and return a SessionResult."""
    config = config or SessionConfig()
    state_a = PartyState("A", hull_a, config, keypair=keypair)
    state_b = PartyState("B", hull_b, config)
    start = time.perf_counter()
    if kind == "memory":
        va, vb = run_memory(state_a, state_b)
    elif kind == "threads":
        va, vb = run_threaded(state_a, state_b, config.timeout)
    elif kind == "tcp":
        va, vb = run_tcp_loopback(state_a, state_b, config.timeout)
    else:
        raise ValueError(f"unknown transport kind {kind!r}")
    return SessionResult(va, vb, state_a, state_b, (time.perf_counter() - start) * 1000)
