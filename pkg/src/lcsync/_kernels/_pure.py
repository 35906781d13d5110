"""Pure numpy/scipy twin of the compiled propagation kernels.

Selected automatically when the extension module is unavailable (or when
LCSYNC_PURE_PYTHON=1).  Functionally identical to the compiled backend;
results agree to floating-point roundoff, not bit for bit, because the
operation order differs.
"""

from __future__ import annotations

import numpy as np

from ._ops import KernelOps

BACKEND = "pure-python"


def lindblad_apply(ops: KernelOps, state: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """L(state) for an arbitrary (not necessarily Hermitian) matrix."""
    g = ops.drift.to_scipy()
    res = g @ state
    res += (g @ state.conj().T).conj().T
    for j in ops.jumps:
        js = j.to_scipy()
        y = js @ state
        res += (js @ y.conj().T).conj().T
    if out is not None:
        out[...] = res
        return out
    return res


def _rk4_step(ops: KernelOps, state: np.ndarray, dt: float) -> np.ndarray:
    k1 = lindblad_apply(ops, state)
    k2 = lindblad_apply(ops, state + (0.5 * dt) * k1)
    k3 = lindblad_apply(ops, state + (0.5 * dt) * k2)
    k4 = lindblad_apply(ops, state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_run(ops: KernelOps, state: np.ndarray, dt: float, n_steps: int) -> None:
    """Advance ``state`` in place by n_steps of classical RK4."""
    cur = state
    for _ in range(n_steps):
        cur = _rk4_step(ops, cur, dt)
    state[...] = cur


def rk4_sample_states(
    ops: KernelOps,
    state: np.ndarray,
    dt: float,
    n_steps: int,
    sample_every: int,
    out_states: np.ndarray,
) -> None:
    """Run RK4, writing the state after every ``sample_every`` steps.

    ``out_states`` must have shape (n_steps // sample_every, dim, dim).
    """
    cur = state
    idx = 0
    for step in range(1, n_steps + 1):
        cur = _rk4_step(ops, cur, dt)
        if step % sample_every == 0:
            out_states[idx] = cur
            idx += 1
    state[...] = cur


def rk4_sample_expect(
    ops: KernelOps,
    state: np.ndarray,
    dt: float,
    n_steps: int,
    sample_every: int,
    observables: np.ndarray,
    out_expect: np.ndarray,
) -> None:
    """Run RK4, recording Tr[O state] for each observable at each sample.

    ``out_expect`` has shape (n_steps // sample_every, n_obs), complex.
    """
    cur = state
    idx = 0
    for step in range(1, n_steps + 1):
        cur = _rk4_step(ops, cur, dt)
        if step % sample_every == 0:
            for m, obs in enumerate(observables):
                out_expect[idx, m] = np.einsum("ij,ji->", obs, cur)
            idx += 1
    state[...] = cur


def sme_heterodyne(
    ops: KernelOps,
    channels: list,
    state: np.ndarray,
    dt: float,
    n_steps: int,
    sample_every: int,
    noise: np.ndarray,
    observables: np.ndarray,
    out_obs: np.ndarray,
    out_inst: np.ndarray,
    out_sig: np.ndarray,
    out_dz: np.ndarray,
    snapshot_steps: np.ndarray,
    out_snaps: np.ndarray,
    trace_tol: float = 1e-6,
) -> int:
    """Euler-Maruyama integration of the heterodyne stochastic master equation.

    ``channels`` holds PackedCsr matrices of the scaled monitored jumps
    c_j = sqrt(rate_j) L_j, which must also be part of ``ops``.  Per step
    and channel, two independent N(0,1) draws from ``noise`` (shape
    (n_steps, n_ch, 2)) build dZ = (dWx + i dWy)/sqrt(2).  The
    deterministic Lindblad part advances by one RK4 step and the
    innovation, evaluated at the step-start state, is added on top:

        rho' = RK4(rho, dt) + dZ* (c rho - <c> rho) + dZ (rho c^dag - <c>* rho),

    followed by Hermitization and trace renormalization.

    Records per sample window of ``sample_every`` steps: observable
    expectations and instantaneous <c_j> at the window start, the window
    mean of <c_j>, and the summed dZ_j.  Returns 0 on success or the
    1-based step index at which the trace drifted beyond ``trace_tol``
    before renormalization.
    """
    n_ch = len(channels)
    ch = [c.to_scipy() for c in channels]
    scale = np.sqrt(dt) / np.sqrt(2.0)
    n_samples = n_steps // sample_every
    cur = state.copy()
    snap_pos = 0

    for k in range(n_samples):
        for m, obs in enumerate(observables):
            out_obs[k, m] = np.einsum("ij,ji->", obs, cur)
        sig_acc = np.zeros(n_ch, dtype=complex)
        dz_acc = np.zeros(n_ch, dtype=complex)
        for s in range(sample_every):
            step = k * sample_every + s
            drho = np.zeros_like(cur)
            for j in range(n_ch):
                y = ch[j] @ cur
                exp_c = complex(np.trace(y))
                if s == 0:
                    out_inst[j, k] = exp_c
                dz = (noise[step, j, 0] + 1j * noise[step, j, 1]) * scale
                drho += np.conj(dz) * (y - exp_c * cur)
                drho += dz * ((ch[j] @ cur.conj().T).conj().T - np.conj(exp_c) * cur)
                sig_acc[j] += exp_c
                dz_acc[j] += dz
            cur = _rk4_step(ops, cur, dt) + drho
            cur = 0.5 * (cur + cur.conj().T)
            tr = float(np.trace(cur).real)
            if abs(tr - 1.0) > trace_tol:
                return step + 1
            cur /= tr
            if snap_pos < len(snapshot_steps) and snapshot_steps[snap_pos] == step + 1:
                out_snaps[snap_pos] = cur
                snap_pos += 1
        out_sig[:, k] = sig_acc / sample_every
        out_dz[:, k] = dz_acc
    state[...] = cur
    return 0
