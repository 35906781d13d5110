# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled propagation kernels.

CSR-structured application of a Lindblad generator plus the two hot
loops built on it: fixed-step RK4 for the deterministic master equation
and Euler-Maruyama stepping of the heterodyne stochastic master
equation.  Semantics match lcsync._kernels._pure exactly; see that
module for the update formulas.
"""

import numpy as np

from libc.math cimport fabs, sqrt

cdef extern from "complex.h" nogil:
    double complex conj(double complex)
    double creal(double complex)

ctypedef double complex cplx

BACKEND = "compiled"


cdef struct OpsView:
    const cplx *gd
    const int *gi
    const int *gp
    const cplx *jd
    const int *ji
    const int *jp
    int n_jumps
    int d


cdef inline void _csr_lmul(const cplx *data, const int *indices, const int *indptr,
                           const cplx *x, cplx *out, cplx scale, int d) noexcept nogil:
    # out += scale * (A @ x), A in CSR form
    cdef int i, jj, l, j
    cdef cplx v
    for i in range(d):
        for jj in range(indptr[i], indptr[i + 1]):
            l = indices[jj]
            v = scale * data[jj]
            for j in range(d):
                out[i * d + j] = out[i * d + j] + v * x[l * d + j]


cdef inline void _csr_rmul_dag(const cplx *data, const int *indices, const int *indptr,
                               const cplx *x, cplx *out, cplx scale, int d) noexcept nogil:
    # out += scale * (x @ A^dag): (x A^dag)[i, j] = sum_l x[i, l] conj(A[j, l])
    cdef int i, jj, l, j
    cdef cplx v
    for j in range(d):
        for jj in range(indptr[j], indptr[j + 1]):
            l = indices[jj]
            v = scale * conj(data[jj])
            for i in range(d):
                out[i * d + j] = out[i * d + j] + v * x[i * d + l]


cdef inline void _zero(cplx *x, int n) noexcept nogil:
    cdef int i
    for i in range(n):
        x[i] = 0


cdef void _apply(OpsView *ops, const cplx *x, cplx *out, cplx *tmp) noexcept nogil:
    # out = G x + x G^dag + sum_k J_k x J_k^dag
    cdef int k, d = ops.d
    _zero(out, d * d)
    _csr_lmul(ops.gd, ops.gi, ops.gp, x, out, 1.0, d)
    _csr_rmul_dag(ops.gd, ops.gi, ops.gp, x, out, 1.0, d)
    for k in range(ops.n_jumps):
        _zero(tmp, d * d)
        _csr_lmul(ops.jd, ops.ji, ops.jp + k * (d + 1), x, tmp, 1.0, d)
        _csr_rmul_dag(ops.jd, ops.ji, ops.jp + k * (d + 1), tmp, out, 1.0, d)


cdef void _rk4_step(OpsView *ops, cplx *rho, cplx *k1, cplx *k2, cplx *k3, cplx *k4,
                    cplx *yt, cplx *tmp, double dt) noexcept nogil:
    cdef int i, n = ops.d * ops.d
    _apply(ops, rho, k1, tmp)
    for i in range(n):
        yt[i] = rho[i] + 0.5 * dt * k1[i]
    _apply(ops, yt, k2, tmp)
    for i in range(n):
        yt[i] = rho[i] + 0.5 * dt * k2[i]
    _apply(ops, yt, k3, tmp)
    for i in range(n):
        yt[i] = rho[i] + dt * k3[i]
    _apply(ops, yt, k4, tmp)
    for i in range(n):
        rho[i] = rho[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


cdef cplx _expect_dense(const cplx *o, const cplx *rho, int d) noexcept nogil:
    cdef int i, j
    cdef cplx acc = 0
    for i in range(d):
        for j in range(d):
            acc = acc + o[i * d + j] * rho[j * d + i]
    return acc


class _View:
    """Keeps the numpy buffers referenced while C pointers are in use."""

    def __init__(self, ops):
        self.gd = np.ascontiguousarray(ops.drift.data)
        self.gi = np.ascontiguousarray(ops.drift.indices)
        self.gp = np.ascontiguousarray(ops.drift.indptr)
        self.jd = np.ascontiguousarray(ops.jump_data)
        self.ji = np.ascontiguousarray(ops.jump_indices)
        self.jp = np.ascontiguousarray(ops.jump_indptr.reshape(-1))
        self.n_jumps = int(ops.jump_indptr.shape[0])
        self.d = int(ops.dim)


cdef OpsView _view(object holder, cplx[::1] gd, int[::1] gi, int[::1] gp,
                   cplx[::1] jd, int[::1] ji, int[::1] jp):
    cdef OpsView v
    v.gd = &gd[0] if gd.shape[0] else NULL
    v.gi = &gi[0] if gi.shape[0] else NULL
    v.gp = &gp[0]
    v.jd = &jd[0] if jd.shape[0] else NULL
    v.ji = &ji[0] if ji.shape[0] else NULL
    v.jp = &jp[0] if jp.shape[0] else NULL
    v.n_jumps = holder.n_jumps
    v.d = holder.d
    return v


def lindblad_apply(ops, state, out=None):
    """L(state); matches the pure backend's function of the same name."""
    h = _View(ops)
    cdef cplx[::1] gd = h.gd
    cdef int[::1] gi = h.gi
    cdef int[::1] gp = h.gp
    cdef cplx[::1] jd = h.jd
    cdef int[::1] ji = h.ji
    cdef int[::1] jp = h.jp
    cdef OpsView v = _view(h, gd, gi, gp, jd, ji, jp)
    x = np.ascontiguousarray(state, dtype=complex)
    res = np.empty_like(x) if out is None else out
    tmp = np.empty_like(x)
    cdef cplx[:, ::1] xv = x
    cdef cplx[:, ::1] rv = res
    cdef cplx[:, ::1] tv = tmp
    with nogil:
        _apply(&v, &xv[0, 0], &rv[0, 0], &tv[0, 0])
    return res


def rk4_run(ops, cplx[:, ::1] state, double dt, long n_steps):
    """Advance ``state`` in place by n_steps of RK4."""
    h = _View(ops)
    cdef cplx[::1] gd = h.gd
    cdef int[::1] gi = h.gi
    cdef int[::1] gp = h.gp
    cdef cplx[::1] jd = h.jd
    cdef int[::1] ji = h.ji
    cdef int[::1] jp = h.jp
    cdef OpsView v = _view(h, gd, gi, gp, jd, ji, jp)
    cdef int d = v.d
    work = np.empty((6, d, d), dtype=complex)
    cdef cplx[:, :, ::1] w = work
    cdef long step
    with nogil:
        for step in range(n_steps):
            _rk4_step(&v, &state[0, 0], &w[0, 0, 0], &w[1, 0, 0], &w[2, 0, 0],
                      &w[3, 0, 0], &w[4, 0, 0], &w[5, 0, 0], dt)


def rk4_sample_states(ops, cplx[:, ::1] state, double dt, long n_steps,
                      long sample_every, cplx[:, :, ::1] out_states):
    """RK4, copying the state into ``out_states`` every ``sample_every`` steps."""
    h = _View(ops)
    cdef cplx[::1] gd = h.gd
    cdef int[::1] gi = h.gi
    cdef int[::1] gp = h.gp
    cdef cplx[::1] jd = h.jd
    cdef int[::1] ji = h.ji
    cdef int[::1] jp = h.jp
    cdef OpsView v = _view(h, gd, gi, gp, jd, ji, jp)
    cdef int d = v.d
    cdef int i, n = d * d
    work = np.empty((6, d, d), dtype=complex)
    cdef cplx[:, :, ::1] w = work
    cdef long step, idx = 0
    with nogil:
        for step in range(1, n_steps + 1):
            _rk4_step(&v, &state[0, 0], &w[0, 0, 0], &w[1, 0, 0], &w[2, 0, 0],
                      &w[3, 0, 0], &w[4, 0, 0], &w[5, 0, 0], dt)
            if step % sample_every == 0:
                for i in range(n):
                    (&out_states[idx, 0, 0])[i] = (&state[0, 0])[i]
                idx += 1


def rk4_sample_expect(ops, cplx[:, ::1] state, double dt, long n_steps,
                      long sample_every, const cplx[:, :, ::1] observables,
                      cplx[:, ::1] out_expect):
    """RK4, recording Tr[O state] per observable every ``sample_every`` steps."""
    h = _View(ops)
    cdef cplx[::1] gd = h.gd
    cdef int[::1] gi = h.gi
    cdef int[::1] gp = h.gp
    cdef cplx[::1] jd = h.jd
    cdef int[::1] ji = h.ji
    cdef int[::1] jp = h.jp
    cdef OpsView v = _view(h, gd, gi, gp, jd, ji, jp)
    cdef int d = v.d
    cdef int m, n_obs = observables.shape[0]
    work = np.empty((6, d, d), dtype=complex)
    cdef cplx[:, :, ::1] w = work
    cdef long step, idx = 0
    with nogil:
        for step in range(1, n_steps + 1):
            _rk4_step(&v, &state[0, 0], &w[0, 0, 0], &w[1, 0, 0], &w[2, 0, 0],
                      &w[3, 0, 0], &w[4, 0, 0], &w[5, 0, 0], dt)
            if step % sample_every == 0:
                for m in range(n_obs):
                    out_expect[idx, m] = _expect_dense(&observables[m, 0, 0],
                                                       &state[0, 0], d)
                idx += 1


def sme_heterodyne(ops, channels, cplx[:, ::1] state, double dt, long n_steps,
                   long sample_every, const double[:, :, ::1] noise,
                   const cplx[:, :, ::1] observables, cplx[:, ::1] out_obs,
                   cplx[:, ::1] out_inst, cplx[:, ::1] out_sig,
                   cplx[:, ::1] out_dz, const long[::1] snapshot_steps,
                   cplx[:, :, ::1] out_snaps, double trace_tol=1e-6):
    """Euler-Maruyama heterodyne unraveling; see the pure backend docstring.

    Returns 0 on success, or the 1-based step index of a trace-drift
    failure (NaN propagation is caught by the same check).
    """
    h = _View(ops)
    cdef cplx[::1] gd = h.gd
    cdef int[::1] gi = h.gi
    cdef int[::1] gp = h.gp
    cdef cplx[::1] jd = h.jd
    cdef int[::1] ji = h.ji
    cdef int[::1] jp = h.jp
    cdef OpsView v = _view(h, gd, gi, gp, jd, ji, jp)
    cdef int d = v.d
    cdef int n = d * d
    cdef int n_ch = len(channels)

    cd = np.concatenate([c.data for c in channels]) if n_ch else np.zeros(0, dtype=complex)
    ci = (np.concatenate([c.indices for c in channels]) if n_ch
          else np.zeros(0, dtype=np.int32))
    offs = np.cumsum([0] + [c.nnz for c in channels])
    cp = (np.stack([c.indptr + np.int32(offs[k]) for k, c in enumerate(channels)])
          .astype(np.int32).reshape(-1) if n_ch else np.zeros(0, dtype=np.int32))
    cdef cplx[::1] cdv = cd
    cdef int[::1] civ = ci
    cdef int[::1] cpv = cp
    cdef const cplx *ch_data = &cdv[0] if cdv.shape[0] else NULL
    cdef const int *ch_indices = &civ[0] if civ.shape[0] else NULL
    cdef const int *ch_indptr = &cpv[0] if cpv.shape[0] else NULL

    work = np.empty((8, d, d), dtype=complex)
    acc = np.zeros((2, max(n_ch, 1)), dtype=complex)
    cdef cplx[:, :, ::1] w = work
    cdef cplx[:, ::1] av = acc
    cdef int n_obs = observables.shape[0]
    cdef int n_snaps = snapshot_steps.shape[0]
    cdef long n_samples = n_steps // sample_every
    cdef double scale = sqrt(dt) / sqrt(2.0)
    cdef double tr
    cdef long k, s, step
    cdef int i, j, m, snap_pos = 0
    cdef cplx exp_c, dz, coef
    cdef cplx *rho = &state[0, 0]
    cdef cplx *drho = &w[0, 0, 0]
    cdef cplx *tmp = &w[1, 0, 0]
    cdef cplx *ybuf = &w[2, 0, 0]
    cdef long fail_step = 0

    with nogil:
        for k in range(n_samples):
            for m in range(n_obs):
                out_obs[k, m] = _expect_dense(&observables[m, 0, 0], rho, d)
            for j in range(n_ch):
                av[0, j] = 0
                av[1, j] = 0
            for s in range(sample_every):
                step = k * sample_every + s
                # innovation terms, evaluated at the step-start state:
                # dZ* (c rho - <c> rho) + dZ (rho c^dag - <c>* rho)
                _zero(drho, n)
                for j in range(n_ch):
                    _zero(ybuf, n)
                    _csr_lmul(ch_data, ch_indices, ch_indptr + j * (d + 1),
                              rho, ybuf, 1.0, d)
                    exp_c = 0
                    for i in range(d):
                        exp_c = exp_c + ybuf[i * d + i]
                    if s == 0:
                        out_inst[j, k] = exp_c
                    dz = (noise[step, j, 0] + 1j * noise[step, j, 1]) * scale
                    coef = conj(dz)
                    for i in range(n):
                        drho[i] = drho[i] + coef * ybuf[i]
                    coef = conj(dz) * exp_c + dz * conj(exp_c)
                    for i in range(n):
                        drho[i] = drho[i] - coef * rho[i]
                    _csr_rmul_dag(ch_data, ch_indices, ch_indptr + j * (d + 1),
                                  rho, drho, dz, d)
                    av[0, j] = av[0, j] + exp_c
                    av[1, j] = av[1, j] + dz
                # deterministic part: one RK4 step, then add the innovation
                _rk4_step(&v, rho, &w[3, 0, 0], &w[4, 0, 0], &w[5, 0, 0],
                          &w[6, 0, 0], &w[7, 0, 0], tmp, dt)
                for i in range(n):
                    rho[i] = rho[i] + drho[i]
                # Hermitize, then renormalize the trace.
                for i in range(d):
                    for j in range(i + 1, d):
                        exp_c = 0.5 * (rho[i * d + j] + conj(rho[j * d + i]))
                        rho[i * d + j] = exp_c
                        rho[j * d + i] = conj(exp_c)
                tr = 0.0
                for i in range(d):
                    rho[i * d + i] = creal(rho[i * d + i])
                    tr += creal(rho[i * d + i])
                if not fabs(tr - 1.0) <= trace_tol:
                    fail_step = step + 1
                    break
                for i in range(n):
                    rho[i] = rho[i] / tr
                if snap_pos < n_snaps and snapshot_steps[snap_pos] == step + 1:
                    for i in range(n):
                        (&out_snaps[snap_pos, 0, 0])[i] = rho[i]
                    snap_pos += 1
            if fail_step:
                break
            for j in range(n_ch):
                out_sig[j, k] = av[0, j] / sample_every
                out_dz[j, k] = av[1, j]
    return fail_step
