"""Compare the numba and numpy window-membership kernels.

    python3 benchmarks/bench_oracle.py [--repeat 5]

Both backends run on the same chain-shaped polytopes; the script checks that
their masks agree and prints the best wall time per (q, bound) pair.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from padictri import _accel
from padictri.generators import chain_shape
from padictri.oracle import _encode

CASES = [(2, 64), (2, 256), (3, 32), (3, 64), (4, 16), (4, 24)]


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        print("numba unavailable: only the numpy backend will run")
    print(f"{'q':>2} {'B':>4} {'points':>10} {'numpy s':>10} {'numba s':>10} {'speedup':>8}")
    for q, B in CASES:
        A = chain_shape(q, tuple(range(q)), (0,) + (1,) * (q - 1))
        enc = _encode(A)
        argv = (B, enc.mu_c, enc.mu_a, enc.mu_d, enc.nu_c, enc.nu_a, enc.nu_d, enc.nu_inf)
        t_np = best_of(lambda: _accel.members_mask_numpy(*argv), args.repeat)
        if _accel.HAVE_NUMBA:
            _accel.members_mask_numba(*argv)  # compile outside the timing
            t_nb = best_of(lambda: _accel.members_mask_numba(*argv), args.repeat)
            same = np.array_equal(_accel.members_mask_numpy(*argv), _accel.members_mask_numba(*argv))
            if not same:
                raise SystemExit(f"backends disagree at q={q}, B={B}")
            print(f"{q:>2} {B:>4} {(B + 1) ** q:>10} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.2f}")
        else:
            print(f"{q:>2} {B:>4} {(B + 1) ** q:>10} {t_np:>10.4f} {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
