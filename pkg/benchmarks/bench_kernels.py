#!/usr/bin/env python3
"""Benchmark: compiled kernel extension vs the pure-Python (numpy) twin.

Times the three hot loops on representative workloads: exhaustive
satisfiability probes (single-shot parity queries), projected model
counting, and per-copy satisfiability for majority-amplified queries.

Run after an editable install: ``python benchmarks/bench_kernels.py``.
"""

import random
import time

import numpy as np

from paretocount import _kernels_py
from paretocount.engine import _kernel_args, pack_formula
from paretocount.hashing import make_rng
from paretocount.model import Formula, Xor, build_space, lit

try:
    from paretocount import _kernels

    IMPLS = [("compiled", _kernels), ("python", _kernels_py)]
except ImportError:
    print("compiled extension not built; benchmarking the fallback only")
    IMPLS = [("python", _kernels_py)]


def bench_first_sat(impl, reps=2000):
    rnd = random.Random(1)
    packed = []
    for _ in range(reps):
        n = 8
        sp = build_space(0, [n])
        xors = tuple(
            Xor(tuple(v for v in range(n) if rnd.getrandbits(1)), rnd.getrandbits(1))
            for _ in range(4)
        )
        f = Formula(sp, ((lit(0), lit(1)),), xors)
        packed.append(pack_formula(f))
    t0 = time.perf_counter()
    hits = 0
    for p in packed:
        if impl.first_sat(*_kernel_args(p), p.nvars) >= 0:
            hits += 1
    return time.perf_counter() - t0, hits


def bench_count(impl, reps=20):
    rnd = random.Random(2)
    packed = []
    for _ in range(reps):
        n = 18
        sp = build_space(0, [n])
        clauses = tuple(
            tuple(lit(v, rnd.getrandbits(1) == 1) for v in rnd.sample(range(n), 3))
            for _ in range(20)
        )
        packed.append(pack_formula(Formula(sp, clauses)))
    t0 = time.perf_counter()
    total = 0
    for p in packed:
        total += int(
            impl.count_projected(*_kernel_args(p), p.nvars, list(range(12)))
        )
    return time.perf_counter() - t0, total


def bench_copy_sat(impl, reps=50):
    rng = make_rng(3)
    m, l, nmod = 3118, 5, 32
    models = np.unique(
        rng.integers(0, 1 << 20, size=nmod).astype(np.uint64)
    )
    batches = [
        (
            rng.integers(0, 1 << 20, size=m * l).astype(np.uint64),
            (rng.random(m * l) < 0.5).astype(np.uint8),
        )
        for _ in range(reps)
    ]
    t0 = time.perf_counter()
    total = 0
    for masks, pars in batches:
        total += int(impl.copy_sat(models, masks, pars, m, l).sum())
    return time.perf_counter() - t0, total


def main():
    rows = []
    for bench in (bench_first_sat, bench_count, bench_copy_sat):
        checks = set()
        for name, impl in IMPLS:
            dt, check = bench(impl)
            checks.add(check)
            rows.append((bench.__name__, name, dt))
        assert len(checks) == 1, f"{bench.__name__}: implementations disagree"
    print(f"{'benchmark':<18} {'backend':<10} {'seconds':>9}")
    base = {}
    for bench_name, name, dt in rows:
        print(f"{bench_name:<18} {name:<10} {dt:>9.3f}")
        base.setdefault(bench_name, dt)
    print()
    for bench_name in dict.fromkeys(r[0] for r in rows):
        times = {name: dt for b, name, dt in rows if b == bench_name}
        if "compiled" in times and "python" in times:
            print(
                f"{bench_name}: compiled is "
                f"{times['python'] / times['compiled']:.1f}x faster"
            )


if __name__ == "__main__":
    main()
