"""Compare the compiled and pure-Python rank kernels.

Run with ``python benchmarks/bench_kernels.py [--batch B] [--repeat R]``.  Each
backend is timed on the same seeded inputs and the results must agree.
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from skewmrd import get_field
from skewmrd.kernels import backends


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run(batch: int = 2000, repeat: int = 3, seed: int = 0) -> list[dict]:
    rng = np.random.default_rng(seed)
    mods = backends()
    rows = []
    cases = []
    for p, r, t in [(3, 1, 3), (3, 1, 4), (5, 1, 3)]:
        ctx = get_field(p, r, t)
        m = ctx.m
        mats = rng.integers(0, p, size=(batch, m, m))
        cases.append((f"rank_mod_p F_{p} {m}x{m}",
                      lambda mod, mats=mats, p=p: mod.batch_rank_mod_p(mats, p)))
        n = ctx.n
        emats = rng.integers(0, ctx.size, size=(batch, n, n))
        shift = ctx.order // 2 if p != 2 else 0
        cases.append((f"rank_ext F_{p}^{m} {n}x{n}",
                      lambda mod, e=emats, c=ctx, s=shift:
                      mod.batch_rank_ext(e, c.exp2, c.log, c.zech, c.order, s)))
    for name, fn in cases:
        results = {}
        row = {"kernel": name, "batch": batch}
        for bname, mod in mods.items():
            secs, out = _time(lambda: fn(mod), repeat)
            results[bname] = np.asarray(out)
            row[bname + "_s"] = round(secs, 5)
        ref = next(iter(results.values()))
        row["agree"] = all(np.array_equal(ref, v) for v in results.values())
        if "cython_s" in row and "python_s" in row:
            row["speedup"] = round(row["python_s"] / max(row["cython_s"], 1e-9), 1)
        rows.append(row)
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for row in run(args.batch, args.repeat, args.seed):
        print(json.dumps(row))


if __name__ == "__main__":
    main()
