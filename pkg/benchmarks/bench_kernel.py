"""Compiled vs pure-Python vertex kernel on deterministic outer bounds.

    python benchmarks/bench_kernel.py [--k 3 4] [--channels 20] [--seed 0]
"""

from __future__ import annotations

import argparse
import random
import time

from icregion import _backend
from icregion.det_capacity import outer_bound
from icregion.det_channel import ManyToOneGains
from icregion.region import _integer_system


def systems(k: int, count: int, seed: int):
    rnd = random.Random(seed)
    for _ in range(count):
        g = ManyToOneGains(k, tuple(rnd.randint(0, 8) for _ in range(k + 1)),
                           tuple(rnd.randint(0, 8) for _ in range(k)))
        p = outer_bound(g)
        A, B, _ = _integer_system(p.dim, p.halfspaces)
        yield A, B


def timed(fn, systems_):
    t = time.perf_counter()
    out = [sorted(fn(A, B)) for A, B in systems_]
    return time.perf_counter() - t, out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--k", type=int, nargs="+", default=[3, 4])
    ap.add_argument("--channels", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"backend at import: {_backend.BACKEND}")
    if _backend._compiled is None:
        print("compiled kernel not built; nothing to compare")
        return
    print(f"{'K':>3} {'rows':>5} {'python s':>10} {'compiled s':>11} {'speedup':>8}")
    for k in args.k:
        sys_ = list(systems(k, args.channels, args.seed))
        tp, vp = timed(lambda A, B: _backend.basic_feasible_points(A, B, backend="python"), sys_)
        tc, vc = timed(lambda A, B: _backend.basic_feasible_points(A, B, backend="compiled"), sys_)
        if vp != vc:
            raise SystemExit(f"K={k}: backends disagree")
        rows = sum(len(A) for A, _ in sys_) // len(sys_)
        print(f"{k:>3} {rows:>5} {tp:>10.3f} {tc:>11.3f} {tp / tc:>7.1f}x")


if __name__ == "__main__":
    main()
