"""``securehull`` command line.

Exit codes: 0 intersect, 1 disjoint, 2 usage, 3 protocol error, 4 oracle
disagreement.  Machine-readable JSON goes to stdout, diagnostics to stderr.
"""

import argparse
import json
import random
import statistics
import sys
import time
from fractions import Fraction

from . import geometry, he, shapes
from .engine import PartyState, SessionConfig, audit_session, audit_transcript, connect, run_session, serve
from .engine.transcript import SecretRecord
from .errors import DegenerateHull, Inconclusive, SecureHullError, UnsupportedKeySize

EXIT_INTERSECT, EXIT_DISJOINT, EXIT_USAGE, EXIT_PROTOCOL, EXIT_DISAGREE = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _emit(obj):
    json.dump(obj, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    sys.stdout.flush()


def _err(msg):
    print(f"securehull: {msg}", file=sys.stderr)


def _verdict_code(verdict):
    return EXIT_INTERSECT if verdict.intersects else EXIT_DISJOINT


def _load_hull(path):
    try:
        return geometry.ConvexHull.load(path)
    except (OSError, ValueError, KeyError, DegenerateHull) as exc:
        raise UsageError(f"cannot load hull {path}: {exc}") from None


def _load_config(path, **overrides):
    try:
        cfg = SessionConfig.load(path) if path else SessionConfig()
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot load config {path}: {exc}") from None
    except SecureHullError as exc:
        raise UsageError(f"bad config {path}: {exc}") from None
    changes = {k: v for k, v in overrides.items() if v is not None}
    return cfg.replace(**changes) if changes else cfg


def _load_key(path):
    if not path:
        return None
    try:
        return he.HEKeyPair.load(path)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot load key {path}: {exc}") from None


def _point(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected x,y,z")
    try:
        return tuple(Fraction(p.strip()) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rational(text):
    try:
        return Fraction(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _addr(text):
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise argparse.ArgumentTypeError("expected host:port")
    return host or "127.0.0.1", int(port)


def _report(verdict, transcript, wall_ms, violations):
    return {
        "verdict": verdict.verdict.value,
        "iterations": verdict.iterations,
        "wall_ms": round(wall_ms, 3),
        "frames_sent": transcript.count("sent"),
        "frames_received": transcript.count("recv"),
        "bytes_sent": transcript.bytes_sent,
        "bytes_received": transcript.bytes_received,
        "audit_violations": violations,
    }


# --------------------------------------------------------------------------
# commands


def cmd_keygen(args):
    try:
        kp = he.keygen(args.bits, seed=args.seed)
    except UnsupportedKeySize as exc:
        raise UsageError(str(exc)) from None
    rng = random.Random(args.seed)
    bound = kp.public_key.half
    for _ in range(100):
        m = rng.randrange(-bound, bound)
        if kp.secret_key.decrypt(kp.public_key.encrypt(m, rng)) != m:
            _err("key self-test failed")
            return EXIT_PROTOCOL
    kp.dump(args.out)
    _emit({"key_bits": kp.key_bits, "key_id": kp.public_key.key_id, "out": args.out})
    return 0


def cmd_gen_shape(args):
    center = args.center or (0, 0, 0)
    try:
        if args.kind == "pyramid":
            hull = shapes.pyramid(args.scale, center)
        elif args.kind == "cuboid":
            hull = shapes.cuboid(args.scale, center, args.dims or (1, 1, 1))
        else:
            if args.vertices is None or args.vertices < 4:
                raise UsageError("--kind random needs --vertices N with N >= 4")
            hull = shapes.random_hull(args.vertices, args.seed, args.scale, center)
    except DegenerateHull as exc:
        raise UsageError(f"degenerate shape: {exc}") from None
    data = hull.to_json()
    if args.out:
        hull.dump(args.out)
    else:
        _emit(data)
    return 0


def cmd_run_local(args):
    a, b = _load_hull(args.shape_a), _load_hull(args.shape_b)
    cfg = _load_config(args.config, seed=args.seed, key_bits=args.key_bits)
    result = run_session(a, b, cfg, keypair=_load_key(args.key), kind=args.transport)
    audit = audit_session(result.transcripts, result.secrets, cfg.frac_bits)
    if args.transcript:
        for role, t in result.transcripts.items():
            t.dump(f"{args.transcript}.{role}.jsonl")
    _emit(_report(result.verdict_a, result.state_a.transcript, result.wall_ms, len(audit)))
    return _verdict_code(result.verdict_a)


def _networked(args, runner, addr):
    hull = _load_hull(args.shape)
    cfg = _load_config(args.config, seed=args.seed, key_bits=args.key_bits)
    state = PartyState(args.role, hull, cfg, keypair=_load_key(args.key) if args.role == "A" else None)
    start = time.perf_counter()

    def ready(sockname):
        _err(f"listening on {sockname[0]}:{sockname[1]}")

    if runner is serve:
        verdict = serve(state, addr[0], addr[1], cfg.timeout, ready=ready)
    else:
        verdict = connect(state, addr[0], addr[1], cfg.timeout)
    wall = (time.perf_counter() - start) * 1000
    audit = audit_transcript(state.transcript, SecretRecord(), cfg.frac_bits)
    if args.transcript:
        state.transcript.dump(args.transcript)
    _emit(_report(verdict, state.transcript, wall, len(audit)))
    return _verdict_code(verdict)


def cmd_serve(args):
    return _networked(args, serve, args.listen)


def cmd_connect(args):
    return _networked(args, connect, args.addr)


def cmd_verify(args):
    a, b = _load_hull(args.shape_a), _load_hull(args.shape_b)
    oracle = geometry.oracle_intersects(a, b)
    plain = geometry.plaintext_intersects(a, b)
    agree = plain.intersects == oracle
    _emit(
        {
            "oracle": "INTERSECT" if oracle else "DISJOINT",
            "plaintext": plain.verdict.value,
            "iterations": plain.iterations,
            "agree": agree,
        }
    )
    if not agree:
        _err("oracle and plaintext search disagree on this pair:")
        print(json.dumps({"a": a.to_json(), "b": b.to_json()}), file=sys.stderr)
        return EXIT_DISAGREE
    return _verdict_code(plain)


def _percentile(values, q):
    ordered = sorted(values)
    k = min(len(ordered) - 1, max(0, round(q * (len(ordered) - 1))))
    return ordered[k]


def cmd_bench(args):
    rng = random.Random(args.seed)
    kp = he.keygen(args.key_bits, seed=args.seed)  # amortised across the runs
    secure_ms, plain_ms, wire = [], [], []
    mismatches = 0
    for i in range(args.pairs):
        a = shapes.random_hull(args.vertices, rng.getrandbits(32))
        center = tuple(Fraction(rng.randint(-96, 96), 64) for _ in range(3))
        b = shapes.random_hull(args.vertices, rng.getrandbits(32), Fraction(rng.randint(32, 96), 64), center)
        t0 = time.perf_counter()
        plain = geometry.plaintext_intersects(a, b)
        t1 = time.perf_counter()
        cfg = SessionConfig(key_bits=args.key_bits, seed=rng.getrandbits(32))
        res = run_session(a, b, cfg, keypair=kp)
        tr = res.state_a.transcript
        row = {
            "pair": i,
            "secure_ms": round(res.wall_ms, 3),
            "plaintext_ms": round((t1 - t0) * 1000, 3),
            "iterations": res.verdict.iterations,
            "max_iter": res.state_a.max_iter,
            "bytes": tr.bytes_sent + tr.bytes_received,
            "verdict": res.verdict.verdict.value,
            "match": res.verdict.verdict == plain.verdict,
        }
        mismatches += not row["match"]
        secure_ms.append(row["secure_ms"])
        plain_ms.append(row["plaintext_ms"])
        wire.append(row["bytes"])
        _emit(row)
    _emit(
        {
            "summary": {
                "pairs": args.pairs,
                "secure_ms_median": statistics.median(secure_ms),
                "secure_ms_p95": _percentile(secure_ms, 0.95),
                "plaintext_ms_median": statistics.median(plain_ms),
                "plaintext_ms_p95": _percentile(plain_ms, 0.95),
                "bytes_median": statistics.median(wire),
                "mismatches": mismatches,
            }
        }
    )
    return EXIT_DISAGREE if mismatches else 0


# --------------------------------------------------------------------------
# parser


def _session_options(p):
    p.add_argument("--config", help="session config JSON {key_bits, frac_bits, max_iter, seed, timeout_ms}")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--key-bits", type=int, choices=he.SUPPORTED_KEY_BITS, help="override config key_bits")
    p.add_argument("--key", help="key file for party A (generated from the seed otherwise)")
    p.add_argument("--transcript", help="write the frame transcript (JSON lines) here")


def build_parser():
    parser = argparse.ArgumentParser(prog="securehull", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate a keypair file")
    p.add_argument("--bits", type=int, default=he.DEFAULT_KEY_BITS)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("gen-shape", help="write a hull file")
    p.add_argument("--kind", choices=sorted(shapes.GENERATORS), required=True)
    p.add_argument("--vertices", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scale", type=_rational, default=Fraction(1))
    p.add_argument("--center", type=_point)
    p.add_argument("--dims", type=_point, help="cuboid edge lengths x,y,z (before scaling)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_shape)

    p = sub.add_parser("run-local", help="run both parties in this process")
    p.add_argument("--shape-a", required=True)
    p.add_argument("--shape-b", required=True)
    p.add_argument("--transport", choices=("threads", "memory", "tcp"), default="threads")
    _session_options(p)
    p.set_defaults(func=cmd_run_local)

    for name, flag, func, role in (("serve", "--listen", cmd_serve, "A"), ("connect", "--addr", cmd_connect, "B")):
        p = sub.add_parser(name, help=f"{name} over TCP (default role {role})")
        p.add_argument(flag, type=_addr, required=True, metavar="HOST:PORT")
        p.add_argument("--shape", required=True)
        p.add_argument("--role", choices=("A", "B"), default=role)
        _session_options(p)
        p.set_defaults(func=func)

    p = sub.add_parser("verify", help="plaintext search and LP oracle on a pair")
    p.add_argument("--shape-a", required=True)
    p.add_argument("--shape-b", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="time secure runs against plaintext runs")
    p.add_argument("--pairs", type=int, default=10)
    p.add_argument("--vertices", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--key-bits", type=int, choices=he.SUPPORTED_KEY_BITS, default=1024)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except Inconclusive as exc:
        _err(f"Inconclusive: {exc}")
        _emit({"error": "Inconclusive", "detail": str(exc)})
        return EXIT_PROTOCOL
    except SecureHullError as exc:
        name = getattr(exc, "name", None) or type(exc).__name__
        _err(f"{name}: {exc}")
        _emit({"error": name, "detail": str(exc)})
        return EXIT_PROTOCOL


if __name__ == "__main__":
    sys.exit(main())
