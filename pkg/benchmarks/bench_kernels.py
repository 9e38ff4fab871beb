#!/usr/bin/env python3
"""Benchmark the compiled kernel extension against the pure-numpy fallback.

Times the kernels that differ between backends (activation passes, fused
Adam, the sequential GAE scan, pairwise overlap tests) plus the shared BLAS
affine path for context, and checks that both backends agree numerically.

    python3 benchmarks/bench_kernels.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from socialgf.backend import available_backends, get_backend


def timeit(fn, repeats):
    fn()  # warmup
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeats", type=int, default=200)
    args = ap.parse_args()

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; run "
              "`python3 setup.py build_ext --inplace` first")
        return 1
    ck = get_backend("compiled")
    pk = get_backend("python")

    rng = np.random.default_rng(0)
    z = np.ascontiguousarray(rng.standard_normal((4096, 64)))
    ga = np.ascontiguousarray(rng.standard_normal((4096, 64)))
    p = rng.standard_normal(64 * 64)
    g = rng.standard_normal(64 * 64)
    T, B = 100, 64
    rewards = np.ascontiguousarray(rng.standard_normal((T, B)))
    values = np.ascontiguousarray(rng.standard_normal((T, B)))
    dones = np.ascontiguousarray((rng.random((T, B)) < 0.01).astype(np.float64))
    last = rng.standard_normal(B)
    pos = np.ascontiguousarray(rng.uniform(-10, 10, (24, 2)))
    radii = np.ascontiguousarray(rng.uniform(0.5, 1.5, 24))
    active = np.ones(24, dtype=np.uint8)
    x = np.ascontiguousarray(rng.standard_normal((256, 64)))
    w = np.ascontiguousarray(rng.standard_normal((64, 64)))
    b = rng.standard_normal(64)

    def adam_case(k):
        pp, mm, vv = p.copy(), np.zeros_like(p), np.zeros_like(p)
        return lambda: k.adam_update(pp, g, mm, vv, 1, 1e-3, 0.9, 0.999, 1e-8)

    cases = [
        ("act_forward tanh (4096x64)", lambda k: (lambda: k.act_forward(2, z))),
        ("act_backward tanh", lambda k: (lambda: k.act_backward(2, z, ga))),
        ("adam_update (4096 params)", adam_case),
        ("gae_scan (T=100, B=64)",
         lambda k: (lambda: k.gae_scan(rewards, values, dones, last, 0.99, 0.95))),
        ("overlap_pairs (n=24)",
         lambda k: (lambda: k.overlap_pairs(pos, radii, active))),
    ]

    print(f"{'kernel':<28} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for name, make in cases:
        t_py = timeit(make(pk), args.repeats)
        t_ck = timeit(make(ck), args.repeats)
        print(f"{name:<28} {t_py*1e6:>8.1f}us {t_ck*1e6:>8.1f}us "
              f"{t_py/t_ck:>7.1f}x")

    t_blas = timeit(lambda: pk.affine_forward(x, w, b), args.repeats)
    print(f"{'affine (BLAS, both backends)':<28} {t_blas*1e6:>8.1f}us "
          f"{t_blas*1e6:>8.1f}us {1.0:>7.1f}x")

    # agreement spot checks
    worst = 0.0
    worst = max(worst, float(np.max(np.abs(ck.act_forward(2, z)
                                           - pk.act_forward(2, z)))))
    worst = max(worst, float(np.max(np.abs(
        ck.gae_scan(rewards, values, dones, last, 0.99, 0.95)
        - pk.gae_scan(rewards, values, dones, last, 0.99, 0.95)))))
    agree = np.array_equal(ck.overlap_pairs(pos, radii, active),
                           pk.overlap_pairs(pos, radii, active))
    print(f"\nmax elementwise difference: {worst:.3g}; overlap sets equal: {agree}")
    return 0 if worst < 1e-9 and agree else 1


if __name__ == "__main__":
    raise SystemExit(main())
