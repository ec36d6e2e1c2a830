"""Compiled (GMP) kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--key-bits 1024 2048] [--repeat 200]

Prints one JSON line per (operation, key size) with per-call microseconds for
each backend and the speedup, then an end-to-end timing of one magnitude
comparison under each backend (run in a subprocess so the backend switch
takes effect at import).
"""

import argparse
import json
import os
import random
import subprocess
import sys
import timeit

from securehull import _purekernels as pure

try:
    from securehull import _kernels as fast
except ImportError:
    fast = None

E2E = """
import time
from securehull import mpc, kernels
ctx = mpc.local_contexts({bits}, seed=1)
start = time.perf_counter()
for k in range(1, {n} + 1):
    mpc.millionaires_compare(k << 32, (100 - k) << 32, 93, ctx)
print(kernels.BACKEND, (time.perf_counter() - start) / {n} * 1e3)
"""


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=repeat, repeat=3)) / repeat * 1e6


def kernel_rows(key_bits, repeat, rng):
    n2 = (rng.getrandbits(key_bits) | 1 << (key_bits - 1) | 1) ** 2
    base = rng.randrange(2, n2)
    short = rng.getrandbits(key_bits // 2)
    full = rng.getrandbits(key_bits)
    bases = [rng.randrange(2, n2) for _ in range(16)]
    exps = [rng.getrandbits(key_bits) for _ in range(16)]
    cases = {
        "powmod_full_exponent": lambda m: (lambda: m.powmod(base, full, n2)),
        "powmod_many_x16": lambda m: (lambda: m.powmod_many(bases, exps, n2)),
    }
    for name, make in cases.items():
        row = {"op": name, "key_bits": key_bits, "python_us": _time(make(pure), repeat // 4 or 1)}
        if fast is not None:
            row["gmp_us"] = _time(make(fast), repeat // 4 or 1)
            row["speedup"] = row["python_us"] / row["gmp_us"]
        yield row
    tables = {"python": pure.FixedBaseTable(base, n2, key_bits // 2)}
    if fast is not None:
        tables["gmp"] = fast.FixedBaseTable(base, n2, key_bits // 2)
    row = {"op": "fixed_base_half_exponent", "key_bits": key_bits}
    for label, table in tables.items():
        row[f"{label}_us"] = _time(lambda t=table: t.pow(short), repeat)
    if "gmp_us" in row:
        row["speedup"] = row["python_us"] / row["gmp_us"]
    yield row


def end_to_end(key_bits, n):
    out = {}
    for label, env in (("python", {"SECUREHULL_PURE_PYTHON": "1"}), ("gmp", {})):
        proc = subprocess.run(
            [sys.executable, "-c", E2E.format(bits=key_bits, n=n)],
            env={**os.environ, **env},
            capture_output=True,
            text=True,
            check=True,
        )
        backend, ms = proc.stdout.split()
        out[f"{backend}_ms"] = float(ms)
    return {"op": "compare_93bit_end_to_end", "key_bits": key_bits, **out}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--key-bits", type=int, nargs="+", default=[1024, 2048])
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--compares", type=int, default=5)
    args = ap.parse_args(argv)
    rng = random.Random(0)
    if fast is None:
        print("compiled kernels not built; timing the fallback only", file=sys.stderr)
    for bits in args.key_bits:
        for row in kernel_rows(bits, args.repeat, rng):
            print(json.dumps(row))
        print(json.dumps(end_to_end(bits, args.compares)))


if __name__ == "__main__":
    main()
