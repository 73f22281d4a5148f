"""Time every hot kernel under the numba and numpy backends.

    python benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Each case is checked for identical output across backends before timing.
"""
import argparse
import json
import time

import numpy as np

from s3decomp import kernels
from s3decomp.pairing import all_partners_array, sample_pairing


def _pairs(partner, d):
    idx = np.arange(partner.size)
    lo = np.flatnonzero(partner > idx)
    return lo // d, partner[lo] // d


def cases():
    p6 = sample_pairing(6, 4, seed=1)
    lo6, hi6 = _pairs(p6.partner, 4)
    p18 = sample_pairing(18, 4, seed=2)
    lo18, hi18 = _pairs(p18.partner, 4)
    big = sample_pairing(20000, 4, seed=3).neighbor_cells()
    mid = sample_pairing(3000, 4, seed=4).neighbor_cells()
    rows = all_partners_array(3, 4)
    idx = np.arange(12)
    lo_b = np.array([np.flatnonzero(r > idx) for r in rows])
    hi_b = np.take_along_axis(rows, lo_b, axis=1)
    draws = np.random.default_rng(0).integers(0, np.arange(79999, 0, -2))
    batch_draws = np.random.default_rng(1).integers(0, np.arange(11, 0, -2), size=(200000, 6))
    return [
        ("match n=20000", "match", (draws, 80000)),
        ("match_batch 2e5 x n=3", "match_batch", (batch_draws, 12)),
        ("count30 brute n=6", "count30", (lo6, hi6, 6)),
        ("count30_batch n=3 all", "count30_batch", (lo_b // 4, hi_b // 4, 3)),
        ("count30_centers n=18", "count30_centers", (lo18, hi18, 18, 12)),
        ("census j<=3 n=20000", "census", (big, 3)),
        ("census j<=6 n=3000", "census", (mid, 6)),
    ]


def _time(fn, args, repeat):
    fn(*args)   # warm-up, includes jit compilation
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="write timings here")
    args = ap.parse_args()
    backends = kernels.available_backends()
    rows = []
    print(f"{'case':28s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for label, name, cargs in cases():
        outs = [np.asarray(kernels.get(name, b)(*cargs)) for b in backends]
        assert all(np.array_equal(outs[0], o) for o in outs[1:]), label
        t = {b: _time(kernels.get(name, b), cargs, args.repeat) for b in backends}
        line = f"{label:28s}" + "".join(f"{t[b] * 1e3:10.2f}ms" for b in backends)
        if len(backends) > 1:
            line += f"{t['numpy'] / t['numba']:11.1f}x"
        print(line)
        rows.append({"case": label, **{f"{b}_seconds": t[b] for b in backends}})
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
