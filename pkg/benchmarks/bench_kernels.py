#!/usr/bin/env python3
"""Benchmark the numba training kernels against the pure-numpy fallback.

The training loop evaluates the loss once per parameter per finite-difference
probe per epoch, so these kernels dominate `optimize-noise` runtime.  Run
directly:

    python benchmarks/bench_kernels.py

Set ZONOPRIV_NO_NUMBA=1 before importing zonopriv to force the numpy path in
the library itself; this script times both implementations side by side in
one process.
"""

import math
import time

import numpy as np

from zonopriv.noise import _kernels
from zonopriv.noise.grid import build_grid
from zonopriv.noise.model import NoiseModelParams


def time_call(fn, *args, repeat=2000):
    fn(*args)  # warm-up / JIT compile
    start = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - start) / repeat


def main():
    if not _kernels.NUMBA_ENABLED:
        print("numba path unavailable (ZONOPRIV_NO_NUMBA set or numba "
              "missing); nothing to compare")
        return
    rng = np.random.default_rng(0)
    grid = build_grid(5.0, 200)
    params = NoiseModelParams.initialize(5.0, 5, rng)
    phi_half = np.ascontiguousarray(grid.half_phi)
    abs_phi = np.abs(grid.phi)
    p = rng.random(grid.size)
    p /= p.sum()
    shift, e_eps, omega = 40, math.exp(0.3), 0.05

    cases = [
        ("half_distribution",
         (_kernels._half_distribution_nb, _kernels._half_distribution_np),
         (phi_half, params.A, params.B, params.C, params.F)),
        ("tight_delta",
         (_kernels._tight_delta_nb, _kernels._tight_delta_np),
         (p, shift, e_eps)),
        ("utility",
         (_kernels._utility_nb, _kernels._utility_np),
         (p, abs_phi, 2)),
        ("training_loss",
         (_kernels._training_loss_nb, _kernels._training_loss_np),
         (phi_half, params.A, params.B, params.C, params.F, shift, e_eps,
          omega, 2)),
    ]

    print(f"{'kernel':<18} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for name, (fn_nb, fn_np), args in cases:
        t_nb = time_call(fn_nb, *args)
        t_np = time_call(fn_np, *args)
        print(f"{name:<18} {t_nb * 1e6:>10.2f}us {t_np * 1e6:>10.2f}us "
              f"{t_np / t_nb:>8.1f}x")

    # End-to-end: one finite-difference epoch (loss at 2 probes per
    # parameter) as executed by train().
    theta = params.to_vector()

    def fd_epoch(loss_fn):
        for i in range(theta.shape[0]):
            for delta in (1e-5, -1e-5):
                probe = theta.copy()
                probe[i] += delta
                v1 = (probe.shape[0] - 1) // 2
                loss_fn(phi_half, probe[0], probe[1:1 + v1], params.C,
                        probe[1 + v1:], shift, e_eps, omega, 2)

    t_nb = time_call(lambda: fd_epoch(_kernels._training_loss_nb), repeat=200)
    t_np = time_call(lambda: fd_epoch(_kernels._training_loss_np), repeat=200)
    print(f"{'fd_epoch':<18} {t_nb * 1e3:>10.3f}ms {t_np * 1e3:>10.3f}ms "
          f"{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
