"""Unconditional open-system dynamics.

Lindblad models, master-equation integration, steady states, and
two-time-correlation spectra via the regression theorem (propagating the
operator-weighted state B rho_ss under the same generator).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .linalg import (
    TruncationWarning,
    assert_density,
    fock_operators,
    identity,
    pauli_operators,
    reduced_populations,
    tensor,
)
from .records import SpectrumSeries

__all__ = [
    "LindbladModel",
    "Liouvillian",
    "StepSizeError",
    "SteadyStateError",
    "build_qvdp_model",
    "build_two_qvdp_model",
    "build_spin_model",
    "build_two_spin_model",
    "evolve_me",
    "evolve_expectations",
    "steady_state",
    "correlation_spectrum",
]

#: Largest Hilbert-space dimension for which the explicit dim^2 x dim^2
#: generator matrix is materialized; above it, only the action is used.
DENSE_MATRIX_MAX_DIM = 64

#: Below this dimension the steady state comes from an SVD null space
#: (which also detects degeneracy); up to DENSE_MATRIX_MAX_DIM a direct
#: solve with a trace constraint is used instead.
SVD_MAX_DIM = 32


#: Truncation policy: the steady-state population of the top two Fock
#: levels of every bosonic mode must stay below this bound.
TRUNCATION_POLICY_TOL = 1e-8


class StepSizeError(RuntimeError):
    """An integration step violated state invariants; reduce dt."""


class SteadyStateError(RuntimeError):
    """Steady-state search failed (no convergence or degenerate null space)."""


@dataclass(frozen=True)
class LindbladModel:
    """Hamiltonian (rad/time) plus jump operators with nonnegative rates (1/time).

    ``subsystem_dims`` records the tensor factorization of the Hilbert
    space; ``bosonic_modes`` lists the factors that are truncated Fock
    spaces, which enables the top-level-population truncation check.
    """

    hamiltonian: np.ndarray
    jumps: tuple[tuple[np.ndarray, float], ...]
    subsystem_dims: tuple[int, ...]
    bosonic_modes: tuple[int, ...] = ()

    def __post_init__(self):
        h = np.asarray(self.hamiltonian, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("Hamiltonian must be a square matrix")
        if np.max(np.abs(h - h.conj().T)) > 1e-12:
            raise ValueError("Hamiltonian must be Hermitian to 1e-12")
        if int(np.prod(self.subsystem_dims)) != h.shape[0]:
            raise ValueError("subsystem_dims inconsistent with Hamiltonian")
        for op, rate in self.jumps:
            if np.asarray(op).shape != h.shape:
                raise ValueError("jump operator shape mismatch")
            if rate < 0:
                raise ValueError("jump rates must be nonnegative")

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]


class Liouvillian:
    """Action (and, for small systems, explicit matrix) of a Lindblad generator."""

    def __init__(self, model: LindbladModel):
        self.model = model
        self.dim = model.dim
        self.ops = _kernels.KernelOps(model.hamiltonian, model.jumps)
        self._matrix: np.ndarray | None = None

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """d(rho)/dt for an arbitrary matrix rho (trace- and Hermiticity-preserving)."""
        return _kernels.lindblad_apply(self.ops, np.ascontiguousarray(rho, dtype=complex))

    def matrix(self) -> np.ndarray:
        """Explicit dim^2 x dim^2 matrix acting on row-major vec(rho)."""
        d = self.dim
        if d > DENSE_MATRIX_MAX_DIM:
            raise ValueError(
                f"dim={d} exceeds the dense-matrix bound {DENSE_MATRIX_MAX_DIM}; "
                "use the action form"
            )
        if self._matrix is None:
            eye = np.eye(d)
            g = self.ops.drift.to_scipy().toarray()
            m = np.kron(g, eye) + np.kron(eye, g.conj())
            for j in self.ops.jumps:
                jm = j.to_scipy().toarray()
                m += np.kron(jm, jm.conj())
            self._matrix = m
        return self._matrix


def _embed(op: np.ndarray, dims: tuple[int, ...], site: int) -> np.ndarray:
    factors = [identity(d) for d in dims]
    factors[site] = op
    out = factors[0]
    for f in factors[1:]:
        out = tensor(out, f)
    return out


def build_qvdp_model(
    omega: float, kappa1: float, kappa2: float, kappa: float, n_max: int
) -> LindbladModel:
    """Quantum van-der-Pol oscillator on a truncated Fock space.

    H = omega a^dag a with linear gain kappa1 (jump a^dag), two-excitation
    loss kappa2 (jump a^2), and linear loss kappa (jump a).
    """
    a, a_dag, n = fock_operators(n_max)
    jumps = [(a_dag, kappa1), (a @ a, kappa2), (a, kappa)]
    return LindbladModel(
        hamiltonian=omega * n,
        jumps=tuple((op, float(rate)) for op, rate in jumps),
        subsystem_dims=(n_max + 1,),
        bosonic_modes=(0,),
    )


def build_two_qvdp_model(
    delta: float, coupling: float, kappa1: float, kappa2: float, kappa: float, n_max: int
) -> LindbladModel:
    """Two dissipatively coupled quantum van-der-Pol oscillators.

    In the frame rotating at the mean frequency: H = (delta/2)(a^dag a -
    b^dag b), with the joint loss channel a - b at rate ``coupling`` plus
    the per-mode gain/loss/two-excitation channels of the single
    oscillator.
    """
    a1, _, n1 = fock_operators(n_max)
    dims = (n_max + 1, n_max + 1)
    a = _embed(a1, dims, 0)
    b = _embed(a1, dims, 1)
    na = _embed(n1, dims, 0)
    nb = _embed(n1, dims, 1)
    jumps = [
        (a - b, coupling),
        (a.conj().T, kappa1),
        (b.conj().T, kappa1),
        (a @ a, kappa2),
        (b @ b, kappa2),
        (a, kappa),
        (b, kappa),
    ]
    return LindbladModel(
        hamiltonian=0.5 * delta * (na - nb),
        jumps=tuple((op, float(rate)) for op, rate in jumps),
        subsystem_dims=dims,
        bosonic_modes=(0, 1),
    )


def build_spin_model(omega: float, gamma_plus: float, gamma_minus: float) -> LindbladModel:
    """Single spin-1/2: H = (omega/2) sz, gain sigma^+ and loss sigma^-."""
    _, _, sz, sp, sm = pauli_operators()
    return LindbladModel(
        hamiltonian=0.5 * omega * sz,
        jumps=((sp, float(gamma_plus)), (sm, float(gamma_minus))),
        subsystem_dims=(2,),
    )


def build_two_spin_model(
    delta: float, coupling: float, gamma_plus: float, gamma_minus: float
) -> LindbladModel:
    """Two detuned spins-1/2 with a collective loss channel sigma^-_A + sigma^-_B.

    H = (delta/4)(sz_A - sz_B); each spin keeps its own gain and loss.
    """
    _, _, sz, sp, sm = pauli_operators()
    dims = (2, 2)
    sz_a, sz_b = _embed(sz, dims, 0), _embed(sz, dims, 1)
    sp_a, sp_b = _embed(sp, dims, 0), _embed(sp, dims, 1)
    sm_a, sm_b = _embed(sm, dims, 0), _embed(sm, dims, 1)
    jumps = [
        (sm_a + sm_b, coupling),
        (sp_a, gamma_plus),
        (sp_b, gamma_plus),
        (sm_a, gamma_minus),
        (sm_b, gamma_minus),
    ]
    return LindbladModel(
        hamiltonian=0.25 * delta * (sz_a - sz_b),
        jumps=tuple((op, float(rate)) for op, rate in jumps),
        subsystem_dims=dims,
    )


def _as_liouvillian(model_or_liouv) -> Liouvillian:
    if isinstance(model_or_liouv, Liouvillian):
        return model_or_liouv
    return Liouvillian(model_or_liouv)


def check_truncation(model: LindbladModel, rho: np.ndarray, *, context: str = "") -> bool:
    """Warn when a bosonic mode's top two levels carry weight above tolerance.

    Returns True when the truncation is adequate.
    """
    ok = True
    for mode in model.bosonic_modes:
        pops = reduced_populations(rho, model.subsystem_dims, mode)
        top = float(pops[-2:].sum())
        if top > TRUNCATION_POLICY_TOL:
            ok = False
            warnings.warn(
                f"top two Fock levels of mode {mode} hold population {top:.2e}"
                f"{' in ' + context if context else ''}; increase n_max",
                TruncationWarning,
                stacklevel=3,
            )
    return ok


def evolve_me(
    model_or_liouv,
    rho0: np.ndarray,
    dt: float,
    t_final: float,
    sample_every: int = 1,
    *,
    invariant_tol: float = 1e-9,
) -> list[tuple[float, np.ndarray]]:
    """Integrate d(rho)/dt = L(rho) with fixed-step RK4, sampling states.

    Returns [(0, rho0), (t_1, rho_1), ...] with t_k = k * sample_every * dt.
    Every sampled state is validated as a density operator; a violation
    raises :class:`StepSizeError` with a step-size diagnostic.
    """
    liouv = _as_liouvillian(model_or_liouv)
    if dt <= 0 or t_final <= 0:
        raise ValueError("dt and t_final must be positive")
    n_steps = max(1, round(t_final / dt))
    n_steps += (-n_steps) % sample_every
    n_samples = n_steps // sample_every
    state = np.ascontiguousarray(rho0, dtype=complex).copy()
    out = np.empty((n_samples, liouv.dim, liouv.dim), dtype=complex)
    _kernels.rk4_sample_states(liouv.ops, state, dt, n_steps, sample_every, out)
    result = [(0.0, np.asarray(rho0, dtype=complex).copy())]
    for k in range(n_samples):
        t = (k + 1) * sample_every * dt
        try:
            assert_density(
                out[k],
                trace_tol=invariant_tol,
                herm_tol=invariant_tol,
                context=f"t={t:.6g}",
            )
        except ValueError as exc:
            raise StepSizeError(
                f"state invariant violated at t={t:.6g} with dt={dt:.3e}; "
                f"reduce dt ({exc})"
            ) from exc
        result.append((t, out[k].copy()))
    check_truncation(liouv.model, result[-1][1], context="evolve_me final state")
    return result


def evolve_expectations(
    model_or_liouv,
    rho0: np.ndarray,
    dt: float,
    t_final: float,
    observables: list[np.ndarray],
    sample_every: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Like :func:`evolve_me` but records only Tr[O rho(t)] per observable.

    Returns (times, values) with values of shape (len(times), n_obs),
    complex, including the t=0 sample.
    """
    liouv = _as_liouvillian(model_or_liouv)
    n_steps = max(1, round(t_final / dt))
    n_steps += (-n_steps) % sample_every
    n_samples = n_steps // sample_every
    state = np.ascontiguousarray(rho0, dtype=complex).copy()
    obs = np.ascontiguousarray(np.stack(observables), dtype=complex)
    out = np.empty((n_samples, len(observables)), dtype=complex)
    _kernels.rk4_sample_expect(liouv.ops, state, dt, n_steps, sample_every, obs, out)
    first = np.array([np.einsum("ij,ji->", o, rho0) for o in observables])
    times = np.arange(n_samples + 1) * (sample_every * dt)
    return times, np.vstack([first, out])


def _stiffness_scale(liouv: Liouvillian, rng_seed: int = 7) -> float:
    """Crude spectral-radius estimate of L by power iteration on its action."""
    rng = np.random.default_rng(rng_seed)
    d = liouv.dim
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    x /= np.linalg.norm(x)
    lam = 1.0
    for _ in range(12):
        y = liouv.apply(x)
        lam = np.linalg.norm(y)
        if lam == 0:
            return 1.0
        x = y / lam
    return float(lam)


def stable_dt(liouv_or_model, safety: float = 0.5) -> float:
    """Fixed RK4 step comfortably inside the explicit stability region."""
    liouv = _as_liouvillian(liouv_or_model)
    return safety * 2.5 / _stiffness_scale(liouv)


def steady_state(
    liouv_or_model,
    *,
    method: str = "auto",
    residual_tol: float = 1e-9,
    evolve_tol: float = 1e-10,
    max_time: float = 1e4,
    dt: float | None = None,
) -> np.ndarray:
    """Unique stationary state of the generator.

    ``method`` is ``"auto"`` (dense null space for dim <= 64, otherwise
    long-time integration), ``"dense"``, or ``"evolve"``.  The dense path
    uses an SVD null space for dim <= 32 (detecting degeneracy) and a
    trace-constrained direct solve up to dim 64.  The evolve path
    integrates from the maximally mixed state until the max-entry norm of
    L(rho) drops below ``evolve_tol``.
    """
    liouv = _as_liouvillian(liouv_or_model)
    d = liouv.dim
    if method == "auto":
        method = "dense" if d <= DENSE_MATRIX_MAX_DIM else "evolve"

    if method == "dense":
        rho = _steady_dense(liouv, residual_tol)
    elif method == "evolve":
        rho = _steady_evolve(liouv, evolve_tol, max_time, dt)
    else:
        raise ValueError(f"unknown steady-state method {method!r}")

    assert_density(rho, trace_tol=1e-9, herm_tol=1e-9, context="steady state")
    check_truncation(liouv.model, rho, context="steady state")
    return rho


def _steady_dense(liouv: Liouvillian, residual_tol: float) -> np.ndarray:
    d = liouv.dim
    m = liouv.matrix()
    if d <= SVD_MAX_DIM:
        _, s, vh = scipy.linalg.svd(m)
        if s[0] == 0.0:
            raise SteadyStateError("zero generator")
        n_null = int(np.sum(s < s[0] * 1e-8))
        if n_null > 1:
            raise SteadyStateError(f"degenerate null space (dimension {n_null})")
        vec = vh[-1].conj()
    else:
        a = m.copy()
        # Replace the first row with the trace functional, Tr rho = 1.
        a[0, :] = 0.0
        a[0, :: d + 1] = 1.0
        b = np.zeros(d * d, dtype=complex)
        b[0] = 1.0
        try:
            vec = scipy.linalg.solve(a, b)
        except scipy.linalg.LinAlgError as exc:
            raise SteadyStateError(f"singular generator matrix: {exc}") from exc
    rho = vec.reshape(d, d)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    residual = np.max(np.abs(m @ rho.reshape(-1)))
    if residual > residual_tol * max(1.0, np.max(np.abs(m))):
        raise SteadyStateError(f"null-vector residual {residual:.3e} too large")
    return rho


def _steady_evolve(
    liouv: Liouvillian, evolve_tol: float, max_time: float, dt: float | None
) -> np.ndarray:
    d = liouv.dim
    if dt is None:
        dt = stable_dt(liouv)
    state = np.ascontiguousarray(np.eye(d, dtype=complex) / d)
    t = 0.0
    chunk = max(16, int(round(1.0 / dt / 4)))
    while t < max_time:
        _kernels.rk4_run(liouv.ops, state, dt, chunk)
        t += chunk * dt
        state = 0.5 * (state + state.conj().T)
        state /= np.trace(state).real
        if np.max(np.abs(liouv.apply(state))) < evolve_tol:
            return state
    raise SteadyStateError(
        f"no convergence to ||L(rho)|| < {evolve_tol:.1e} within t={max_time}"
    )


def correlation_spectrum(
    liouv_or_model,
    rho_ss: np.ndarray,
    op_left: np.ndarray,
    op_right: np.ndarray,
    tau_max: float,
    d_tau: float,
    omegas: np.ndarray,
    *,
    dt: float | None = None,
    window: str = "auto",
    tail_tol: float = 0.05,
) -> SpectrumSeries:
    """Steady-state spectrum of <A(t+tau) B(t)> by the regression theorem.

    Propagates X(tau) = e^{L tau}(B rho_ss), samples g(tau) = Tr[A X(tau)]
    on the grid tau = 0, d_tau, ..., tau_max, extends to negative lags by
    g(-tau) = g(tau)*, and evaluates S(omega) = integral e^{-i omega tau}
    g(tau) d tau on the requested grid.

    A slowly decaying tail (|g(tau_max)| > ``tail_tol`` |g(0)|) triggers a
    warning; with ``window="auto"`` an exponential taper exp(-3 tau /
    tau_max) is then applied (adding a known 3/tau_max to linewidths),
    with ``window="none"`` the raw correlation is transformed as is.
    """
    liouv = _as_liouvillian(liouv_or_model)
    if dt is None:
        dt = stable_dt(liouv)
    per = max(1, int(np.ceil(d_tau / dt)))
    dt = d_tau / per
    n_lags = int(round(tau_max / d_tau))
    state = np.ascontiguousarray(op_right @ rho_ss, dtype=complex)
    g0 = complex(np.einsum("ij,ji->", op_left, state))
    obs = np.ascontiguousarray(op_left[None, :, :], dtype=complex)
    out = np.empty((n_lags, 1), dtype=complex)
    _kernels.rk4_sample_expect(liouv.ops, state, dt, n_lags * per, per, obs, out)
    g = np.concatenate([[g0], out[:, 0]])

    if abs(g[-1]) > tail_tol * max(abs(g0), 1e-300):
        warnings.warn(
            f"correlation tail |g(tau_max)|/|g(0)| = {abs(g[-1]) / abs(g0):.3g} "
            "exceeds 0.05; increase tau_max or accept windowing bias",
            stacklevel=2,
        )
        if window == "auto":
            g = g * np.exp(-3.0 * np.arange(len(g)) / len(g))
    elif window == "taper":
        g = g * np.exp(-3.0 * np.arange(len(g)) / len(g))

    taus = np.arange(1, len(g)) * d_tau
    omegas = np.asarray(omegas, dtype=float)
    phases = np.exp(-1j * np.outer(omegas, taus))
    values = d_tau * (g[0].real + 2.0 * np.real(phases @ g[1:]))
    return SpectrumSeries(omegas, values, "fft-of-correlation", source="regression")
