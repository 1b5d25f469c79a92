"""Compare the compiled kernels with the pure Python fallback.

Usage: python3 benchmarks/bench_kernels.py [--sizes 1e3..1e6] [--repeats 5]

Prints a CSV with one row per kernel and size: the best time of each
implementation and the speed-up of the compiled one. A final block times an
end-to-end workload (HS states and Haar unitaries) under both settings of
QRS_PURE_PYTHON, each in a fresh interpreter.
"""
import argparse
import csv
import os
import subprocess
import sys
import timeit

import numpy as np

from qrs import _pykernels
from qrs.bench import parse_sizes

try:
    from qrs import _ckernels
except ImportError:
    _ckernels = None


def cases(n):
    rng = np.random.default_rng(0)
    buf = rng.integers(0, 256, 16 * n, dtype=np.uint8).tobytes()
    u = rng.random(n)
    return {
        "splitmix64_words": lambda k: k.splitmix64_words(12345, n),
        "unit_doubles": lambda k: k.unit_doubles(buf[: 8 * n]),
        "box_muller": lambda k: k.box_muller(buf, n),
        "rejection_ints": lambda k: k.rejection_ints(buf[:n], 1, 200, 200, n // 2),
        "neg_log": lambda k: k.neg_log(u),
    }


def best(fn, repeats):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 4
    return min(timeit.repeat(fn, number=number, repeat=repeats)) / number


WORKLOAD = (
    "import time, qrs\n"
    "src = qrs.DeterministicPrng(1)\n"
    "t = time.perf_counter()\n"
    "for _ in range(5000): qrs.random_state_hs(src, 4)\n"
    "for _ in range(5000): qrs.random_unitary(src, 4)\n"
    "print(time.perf_counter() - t)\n"
)


def end_to_end(pure):
    env = dict(os.environ, QRS_PURE_PYTHON="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", WORKLOAD], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", default="1e3..1e6")
    p.add_argument("--repeats", type=int, default=5)
    args = p.parse_args()
    if _ckernels is None:
        sys.exit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["kernel", "size", "cython_s", "python_s", "speedup"])
    for n in parse_sizes(args.sizes):
        for name, fn in cases(n).items():
            tc = best(lambda: fn(_ckernels), args.repeats)
            tp = best(lambda: fn(_pykernels), args.repeats)
            w.writerow([name, n, f"{tc:.3e}", f"{tp:.3e}", f"{tp / tc:.1f}"])
    tc, tp = end_to_end(False), end_to_end(True)
    w.writerow(["workload:5000 hs(4) + 5000 unitary(4)", 10000, f"{tc:.3e}", f"{tp:.3e}", f"{tp / tc:.2f}"])


if __name__ == "__main__":
    main()
