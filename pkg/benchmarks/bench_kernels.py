"""Compare the compiled phase-sum kernel against the numpy fallback.

Run:  python benchmarks/bench_kernels.py [--repeats N]

Times both implementations on binomial weight vectors of increasing length
(the exact shape the marginal evaluator feeds them), checks they agree to
1e-12, and prints a table with the speedup.  A second section times the
end-to-end marginal matrix under each backend via the SPINCHAOS_NO_EXT
switch, which is what actually matters for large-n scans.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from spinchaos._speedups_py import phase_weighted_sum as py_sum
from spinchaos.kernels import binomial_weights

try:
    from spinchaos._speedups import phase_weighted_sum as cy_sum
except ImportError:
    cy_sum = None


def bench_kernel(repeats: int) -> None:
    print(f"{'m':>9} {'python (us)':>12} {'cython (us)':>12} {'speedup':>8}")
    for m in (1_000, 10_000, 100_000, 1_000_000):
        _, w = binomial_weights(m, 0.7)
        args = (w, -1.3, 2.6 / m)
        t_py = min(timeit.repeat(lambda: py_sum(*args), number=repeats,
                                 repeat=3)) / repeats
        if cy_sum is None:
            print(f"{m:>9} {t_py * 1e6:>12.1f} {'n/a':>12} {'n/a':>8}", flush=True)
            continue
        t_cy = min(timeit.repeat(lambda: cy_sum(*args), number=repeats,
                                 repeat=3)) / repeats
        gap = abs(py_sum(*args) - cy_sum(*args))
        assert gap < 1e-12, f"backends disagree by {gap:.3e}"
        print(f"{m:>9} {t_py * 1e6:>12.1f} {t_cy * 1e6:>12.1f} "
              f"{t_py / t_cy:>8.2f}", flush=True)


MARGINAL_SNIPPET = """
import timeit
from spinchaos import CWParams, QubitState, marginal_fast_matrix
from spinchaos.kernels import KERNEL_BACKEND
q = QubitState(0.7, 0.3, 0.2 + 0.1j)
p = CWParams(J=1.0, Hfield=0.5, n=100000)
t = min(timeit.repeat(lambda: marginal_fast_matrix(q, p, 2, 1.0),
                      number=3, repeat=3)) / 3
print(f"  {KERNEL_BACKEND:<8} {t * 1e3:8.1f} ms per (n=1e5, k=2) marginal")
"""


def bench_marginal() -> None:
    print("\nend-to-end marginal evaluation:", flush=True)
    for force_py in (False, True):
        env = dict(os.environ)
        if force_py:
            env["SPINCHAOS_NO_EXT"] = "1"
        else:
            env.pop("SPINCHAOS_NO_EXT", None)
        subprocess.run([sys.executable, "-c", MARGINAL_SNIPPET], env=env,
                       check=True)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=20,
                        help="timing repetitions per size (default 20)")
    args = parser.parse_args()
    if cy_sum is None:
        print("compiled extension not importable; timing fallback only\n")
    bench_kernel(args.repeats)
    bench_marginal()


if __name__ == "__main__":
    main()
