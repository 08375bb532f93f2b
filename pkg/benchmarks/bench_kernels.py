"""Time the numba kernels against their pure-numpy twins.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from wzwnorms import _kernels
from wzwnorms.kzflow import reduce_four_point


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    if not _kernels.NUMBA_AVAILABLE:
        print("numba is disabled (WZWNORMS_DISABLE_NUMBA set or numba missing); nothing to compare")
        return
    print(f"{'kernel':<28}{'case':<16}{'numba [ms]':>12}{'python [ms]':>13}{'speedup':>9}")
    for j, k in [("1/2", 1), ("3/2", 2), (3, 3)]:
        s = reduce_four_point(j, k, 7.3)
        Y0 = np.eye(s.dim)

        def run(compiled):
            return lambda: _kernels.transport_kernel(s.M0, s.M1, s.kappa, 0, 0.0, 0.0, 0.15, 0.85,
                                                     Y0, 1e-10, 1e-12, compiled=compiled)
        run(True)()  # compile
        fast, slow = best_of(run(True), args.repeat), best_of(run(False), args.repeat)
        print(f"{'dopri_fundamental':<28}{f'j={j} k={k}':<16}{fast * 1e3:>12.3f}{slow * 1e3:>13.3f}"
              f"{slow / fast:>9.1f}")

        w, Q = np.linalg.eigh(s.M0)
        C = Q.T @ s.M1 @ Q
        lead = np.zeros(s.dim)
        lead[0] = 1.0
        rargs = (w, C, s.kappa, w[0] / s.kappa, lead, 0.15, 1e-12, 200)
        _kernels.frobenius_recurrence(*rargs)
        fast = best_of(lambda: _kernels.frobenius_recurrence(*rargs), args.repeat)
        slow = best_of(lambda: _kernels.frobenius_recurrence_py(*rargs), args.repeat)
        print(f"{'frobenius_recurrence':<28}{f'j={j} k={k}':<16}{fast * 1e3:>12.3f}"
              f"{slow * 1e3:>13.3f}{slow / fast:>9.1f}")


if __name__ == "__main__":
    main()
