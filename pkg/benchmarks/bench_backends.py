#!/usr/bin/env python3
"""Benchmark: compiled kernels vs the pure numpy/scipy fallback.

Times the three hot loops (spin SME, single-oscillator SME, two-mode RK4
propagation) on both backends and prints steps/second plus the speedup.

    python3 benchmarks/bench_backends.py [--quick]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from lcsync._kernels import KernelOps, pack_csr, _pure
from lcsync.linalg import fock_operators, identity, pauli_operators, tensor

try:
    from lcsync._kernels import _compiled
except ImportError:
    _compiled = None


def run_sme(backend, ops, channels, rho0, n_steps, dt):
    d = rho0.shape[0]
    noise = np.random.default_rng(7).standard_normal((n_steps, len(channels), 2))
    state = np.ascontiguousarray(rho0.copy())
    n_samples = n_steps // 10
    out_obs = np.zeros((n_samples, 0), dtype=complex)
    out_inst = np.zeros((len(channels), n_samples), dtype=complex)
    out_sig = np.zeros_like(out_inst)
    out_dz = np.zeros_like(out_inst)
    t0 = time.perf_counter()
    status = backend.sme_heterodyne(
        ops, channels, state, dt, n_steps, 10, noise,
        np.zeros((0, d, d), dtype=complex), out_obs, out_inst, out_sig, out_dz,
        np.zeros(0, dtype=np.int64), np.zeros((0, d, d), dtype=complex), 1e-6,
    )
    assert status == 0
    return time.perf_counter() - t0


def run_rk4(backend, ops, rho0, n_steps, dt):
    state = np.ascontiguousarray(rho0.copy())
    t0 = time.perf_counter()
    backend.rk4_run(ops, state, dt, n_steps)
    return time.perf_counter() - t0


def cases(quick: bool):
    _, _, sz, sp, sm = pauli_operators()
    spin_ops = KernelOps(1.0 * sz, [(sp, 0.5), (sm, 1.0)])
    spin_ch = [pack_csr(1.0 * sm)]
    rho2 = np.eye(2, dtype=complex) / 2

    n_max = 20
    a, a_dag, n = fock_operators(n_max)
    qvdp_ops = KernelOps(4.0 * n, [(a_dag, 4.0), (a @ a, 0.5), (a, 1.0)])
    qvdp_ch = [pack_csr(a.copy())]
    rho_q = np.eye(n_max + 1, dtype=complex) / (n_max + 1)

    nm2 = 10
    a1, _, n1 = fock_operators(nm2)
    eye = identity(nm2 + 1)
    a2, b2 = tensor(a1, eye), tensor(eye, a1)
    two_ops = KernelOps(
        2.5 * (tensor(n1, eye) - tensor(eye, n1)),
        [(a2 - b2, 2.0), (a2.conj().T, 3.0), (b2.conj().T, 3.0),
         (a2 @ a2, 1.0), (b2 @ b2, 1.0), (a2, 1.0), (b2, 1.0)],
    )
    rho_two = np.eye((nm2 + 1) ** 2, dtype=complex) / (nm2 + 1) ** 2

    scale = 10 if quick else 1
    return [
        ("spin SME (dim 2)", "sme", spin_ops, spin_ch, rho2, 200_000 // scale, 1e-3),
        ("qvdP SME (dim 21)", "sme", qvdp_ops, qvdp_ch, rho_q, 20_000 // scale, 1e-3),
        ("two-mode RK4 (dim 121)", "rk4", two_ops, None, rho_two, 2_000 // scale, 1e-3),
    ]


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="10x fewer steps")
    args = parser.parse_args()

    backends = [("pure-python", _pure)]
    if _compiled is not None:
        backends.insert(0, ("compiled", _compiled))

    print(f"{'case':<24} {'backend':<12} {'steps':>9} {'time [s]':>9} {'steps/s':>12}")
    for name, kind, ops, channels, rho0, n_steps, dt in cases(args.quick):
        times = {}
        for bname, backend in backends:
            if kind == "sme":
                elapsed = run_sme(backend, ops, channels, rho0, n_steps, dt)
            else:
                elapsed = run_rk4(backend, ops, rho0, n_steps, dt)
            times[bname] = elapsed
            print(f"{name:<24} {bname:<12} {n_steps:>9} {elapsed:>9.3f} "
                  f"{n_steps / elapsed:>12.0f}")
        if len(times) == 2:
            print(f"{name:<24} {'speedup':<12} {'':>9} {'':>9} "
                  f"{times['pure-python'] / times['compiled']:>11.1f}x")


if __name__ == "__main__":
    main()
