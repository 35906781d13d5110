"""Classical noisy limit-cycle dynamics.

Euler-Maruyama integration of the van-der-Pol Langevin equation

    d(alpha) = [-i omega alpha + kappa1 alpha/2 - kappa2 |alpha|^2 alpha] dt
               + sigma (dW_x + i dW_y),

of the two coupled noisy phase equations (constant-radius reduction of
two dissipatively coupled oscillators, frame rotating at the mean
frequency)

    d(phi_A) = [+delta/2 + (V/2) sin(phi_B - phi_A)] dt + (sigma/sqrt 2) dW_A,
    d(phi_B) = [-delta/2 + (V/2) sin(phi_A - phi_B)] dt + (sigma/sqrt 2) dW_B,

plus the estimators built on the resulting trajectory ensembles:
phase(-difference) histograms, (x, p) occupation histograms, spectra
from two-time correlations, and observed frequencies.

Phases follow the convention phi = -arg(alpha), are integrated unwrapped,
and are reduced mod 2 pi only at histogram time.  Trajectory i draws its
noise from an RNG seeded by ``SeedSequence(seed, spawn_key=(i,))``, so
ensembles are reproducible and trivially parallel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .records import HistogramDist, SpectrumSeries, TrajectoryRecord

__all__ = [
    "VdpParams",
    "CoupledPhaseParams",
    "simulate_vdp",
    "simulate_coupled_phases",
    "histogram_phase",
    "histogram_xy",
    "classical_spectrum",
    "observed_frequency_difference",
    "fit_lorentzian",
]

_NOISE_CHUNK = 4096


@dataclass(frozen=True)
class VdpParams:
    """Rates of the noisy van-der-Pol oscillator (all 1/time, sigma2 in amp^2/time)."""

    kappa1: float
    kappa2: float
    omega: float
    sigma2: float

    def __post_init__(self):
        if self.kappa1 <= 0 or self.kappa2 <= 0:
            raise ValueError("kappa1 and kappa2 must be positive")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be nonnegative")

    @property
    def r0(self) -> float:
        """Limit-cycle radius sqrt(kappa1 / 2 kappa2)."""
        return float(np.sqrt(self.kappa1 / (2.0 * self.kappa2)))


@dataclass(frozen=True)
class CoupledPhaseParams:
    """Detuning, dissipative coupling, and noise strength of the phase pair."""

    delta: float
    coupling: float
    sigma2: float

    def __post_init__(self):
        if self.coupling < 0:
            raise ValueError("coupling must be nonnegative")
        if self.sigma2 < 0:
            raise ValueError("sigma2 must be nonnegative")


def trajectory_rngs(seed: int, n_traj: int) -> list[np.random.Generator]:
    """Independent per-trajectory generators from one master seed."""
    return [
        np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        for i in range(n_traj)
    ]


def _validate_run(dt: float, t_final: float, n_traj: int) -> int:
    if dt <= 0 or t_final <= 0:
        raise ValueError("dt and t_final must be positive")
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    return max(1, round(t_final / dt))


def simulate_vdp(
    params: VdpParams,
    alpha0: complex,
    dt: float,
    t_final: float,
    n_traj: int,
    seed: int,
    *,
    sample_every: int = 1,
) -> list[TrajectoryRecord]:
    """Euler-Maruyama ensemble of the van-der-Pol Langevin equation.

    All trajectories start at ``alpha0``.  Real and imaginary noise
    increments are independent Gaussians of variance sigma2 * dt.  States
    are recorded every ``sample_every`` steps (including t=0).  A step
    dt <= 0.01 / max(kappa1, kappa2 |alpha0|^2, omega) keeps the
    integrator bias well below the noise floor.
    """
    n_steps = _validate_run(dt, t_final, n_traj)
    if not np.isfinite(alpha0):
        raise ValueError("alpha0 must be finite")
    n_steps += (-n_steps) % sample_every
    rngs = trajectory_rngs(seed, n_traj)
    state = np.full(n_traj, complex(alpha0))
    n_rec = n_steps // sample_every
    out = np.empty((n_rec + 1, n_traj), dtype=complex)
    out[0] = state
    sig = np.sqrt(params.sigma2 * dt)
    drift_lin = -1j * params.omega + 0.5 * params.kappa1
    step = 0
    while step < n_steps:
        chunk = min(_NOISE_CHUNK, n_steps - step)
        noise = np.stack([rng.standard_normal((chunk, 2)) for rng in rngs], axis=1)
        for s in range(chunk):
            state += dt * (drift_lin * state - params.kappa2 * np.abs(state) ** 2 * state)
            state += sig * (noise[s, :, 0] + 1j * noise[s, :, 1])
            step += 1
            if step % sample_every == 0:
                out[step // sample_every] = state
    times = np.arange(n_rec + 1) * (sample_every * dt)
    return [
        TrajectoryRecord(seed, i, sample_every * dt, times, out[:, i].copy(), "amplitude")
        for i in range(n_traj)
    ]


def simulate_coupled_phases(
    params: CoupledPhaseParams,
    phi0: tuple[float, float],
    dt: float,
    t_final: float,
    n_traj: int,
    seed: int,
    *,
    sample_every: int = 1,
) -> list[TrajectoryRecord]:
    """Euler-Maruyama ensemble of the two noisy coupled phase equations.

    Phases accumulate raw increments (no wrapping), so observed
    frequencies can be read off directly; wrap mod 2 pi only when
    histogramming.
    """
    n_steps = _validate_run(dt, t_final, n_traj)
    n_steps += (-n_steps) % sample_every
    rngs = trajectory_rngs(seed, n_traj)
    phases = np.empty((n_traj, 2))
    phases[:, 0] = phi0[0]
    phases[:, 1] = phi0[1]
    n_rec = n_steps // sample_every
    out = np.empty((n_rec + 1, n_traj, 2))
    out[0] = phases
    sig = np.sqrt(0.5 * params.sigma2 * dt)
    half_d = 0.5 * params.delta
    half_v = 0.5 * params.coupling
    step = 0
    while step < n_steps:
        chunk = min(_NOISE_CHUNK, n_steps - step)
        noise = np.stack([rng.standard_normal((chunk, 2)) for rng in rngs], axis=1)
        for s in range(chunk):
            diff = phases[:, 1] - phases[:, 0]
            sin_diff = np.sin(diff)
            phases[:, 0] += dt * (half_d + half_v * sin_diff)
            phases[:, 1] += dt * (-half_d - half_v * sin_diff)
            phases += sig * noise[s]
            step += 1
            if step % sample_every == 0:
                out[step // sample_every] = phases
    times = np.arange(n_rec + 1) * (sample_every * dt)
    return [
        TrajectoryRecord(seed, i, sample_every * dt, times, out[:, i].copy(), "phase-pair")
        for i in range(n_traj)
    ]


def _stationary_mask(record: TrajectoryRecord, t_min: float) -> np.ndarray:
    return record.times >= t_min - 1e-12


def _phase_samples(record: TrajectoryRecord, t_min: float) -> np.ndarray:
    """Wrapped phase (single oscillator) or phase difference (pair), t >= t_min."""
    sel = _stationary_mask(record, t_min)
    if record.kind == "amplitude":
        phi = -np.angle(record.values[sel])
    else:
        phi = record.values[sel, 0] - record.values[sel, 1]
    return np.mod(phi, 2.0 * np.pi)


def histogram_phase(
    trajs: list[TrajectoryRecord], t_min: float, n_bins: int
) -> HistogramDist:
    """Normalized histogram of phi (or phi_AB) mod 2 pi over all samples with t >= t_min."""
    if n_bins < 8:
        raise ValueError("n_bins must be >= 8")
    edges = np.linspace(0.0, 2.0 * np.pi, n_bins + 1)
    counts = np.zeros(n_bins)
    total = 0
    domain = "phase"
    for rec in trajs:
        if rec.kind == "phase-pair":
            domain = "phase-difference"
        phi = _phase_samples(rec, t_min)
        counts += np.histogram(phi, bins=edges)[0]
        total += len(phi)
    if total == 0:
        raise ValueError("no samples at t >= t_min")
    return HistogramDist((edges,), counts / total, domain, total)


def histogram_xy(
    trajs: list[TrajectoryRecord],
    t_snapshot: float,
    x_edges: np.ndarray,
    p_edges: np.ndarray,
) -> HistogramDist:
    """2-D histogram of (Re alpha, Im alpha) at one recorded time across trajectories."""
    xs, ps = [], []
    for rec in trajs:
        if rec.kind != "amplitude":
            raise ValueError("histogram_xy needs amplitude trajectories")
        idx = int(round((t_snapshot - rec.times[0]) / rec.dt))
        if idx < 0 or idx >= len(rec.times) or abs(rec.times[idx] - t_snapshot) > rec.dt / 2:
            raise ValueError(f"t_snapshot={t_snapshot} outside the recorded grid")
        xs.append(rec.values[idx].real)
        ps.append(rec.values[idx].imag)
    counts, _, _ = np.histogram2d(xs, ps, bins=(x_edges, p_edges))
    total = int(counts.sum())
    if total == 0:
        raise ValueError("all samples fell outside the grid")
    return HistogramDist((x_edges, p_edges), counts / total, "xy-plane", len(xs))


def _autocorrelation(z: np.ndarray, max_lag: int) -> np.ndarray:
    """Unbiased E[conj(z(t+k)) z(t)] over time origins, k = 0..max_lag."""
    n = len(z)
    padded = np.zeros(2 * n, dtype=complex)
    padded[:n] = z
    f = np.fft.fft(padded)
    # ifft(F * conj(F))[k] = sum_t z[t+k] conj(z[t]) for k >= 0
    raw = np.fft.ifft(f * f.conj())[: max_lag + 1].conj()
    return raw / (n - np.arange(max_lag + 1))


def classical_spectrum(
    trajs: list[TrajectoryRecord],
    t_min: float,
    omegas: np.ndarray,
    *,
    tau_max: float | None = None,
) -> list[SpectrumSeries]:
    """Spectra from stationary two-time correlations, one series per oscillator.

    For amplitude trajectories the correlation is E[conj(alpha(t+tau))
    alpha(t)]; for phase pairs it is E[exp(i phi_a(t+tau) - i phi_a(t))]
    per oscillator.  Correlations are averaged over time origins (t >=
    t_min) and trajectories, extended to negative lags Hermitically, and
    transformed with the e^{-i omega tau} convention onto the requested
    grid.
    """
    omegas = np.asarray(omegas, dtype=float)
    d_omega = float(np.min(np.diff(omegas))) if len(omegas) > 1 else 0.1
    rec0 = trajs[0]
    dts = rec0.dt
    sel = _stationary_mask(rec0, t_min)
    span = rec0.times[sel][-1] - rec0.times[sel][0] if sel.any() else 0.0
    if tau_max is None:
        tau_max = min(span / 4.0, 2.0 * np.pi / d_omega)
    if tau_max > span:
        raise ValueError(
            f"stationary segment ({span:.3g}) shorter than requested tau_max ({tau_max:.3g})"
        )
    max_lag = max(1, int(round(tau_max / dts)))

    n_osc = 1 if rec0.kind == "amplitude" else 2
    acc = np.zeros((n_osc, max_lag + 1), dtype=complex)
    for rec in trajs:
        sel = _stationary_mask(rec, t_min)
        if rec.kind == "amplitude":
            acc[0] += _autocorrelation(rec.values[sel], max_lag)
        else:
            # phi = -arg(alpha): the unit-amplitude signal is e^{-i phi}, and
            # E[conj(z(t+tau)) z(t)] then equals E[e^{i phi(t+tau) - i phi(t)}]
            for a in range(2):
                acc[a] += _autocorrelation(np.exp(-1j * rec.values[sel, a]), max_lag)
    acc /= len(trajs)

    taus = np.arange(1, max_lag + 1) * dts
    phases = np.exp(-1j * np.outer(omegas, taus))
    out = []
    for a in range(n_osc):
        values = dts * (acc[a, 0].real + 2.0 * np.real(phases @ acc[a, 1:]))
        out.append(
            SpectrumSeries(omegas, values, "fft-of-correlation", source="classical-trajectories")
        )
    return out


def observed_frequency_difference(trajs: list[TrajectoryRecord], t_min: float) -> float:
    """Ensemble mean of (phi_AB(T) - phi_AB(t_min)) / (T - t_min), unwrapped phases."""
    rates = []
    for rec in trajs:
        if rec.kind != "phase-pair":
            raise ValueError("needs phase-pair trajectories")
        sel = np.where(_stationary_mask(rec, t_min))[0]
        if len(sel) < 2:
            raise ValueError("no stationary segment at t >= t_min")
        i0, i1 = sel[0], sel[-1]
        d_ab0 = rec.values[i0, 0] - rec.values[i0, 1]
        d_ab1 = rec.values[i1, 0] - rec.values[i1, 1]
        rates.append((d_ab1 - d_ab0) / (rec.times[i1] - rec.times[i0]))
    return float(np.mean(rates))


def fit_lorentzian(
    series: SpectrumSeries, *, window: float | None = None
) -> tuple[float, float, float, float]:
    """Least-squares Lorentzian fit around the spectral peak.

    Fits  A / (1 + ((omega - omega0) / (fwhm/2))^2) + c  and returns
    (omega0, fwhm, A, c).  ``window`` restricts the fit to
    |omega - peak| <= window (defaults to the full grid).
    """
    om, val = series.omegas, series.values
    peak = series.peak_omega()
    if window is not None:
        sel = np.abs(om - peak) <= window
        om, val = om[sel], val[sel]
    amp0 = float(val.max())
    half = np.where(val > 0.5 * amp0)[0]
    fwhm0 = max(float(om[half[-1]] - om[half[0]]), float(om[1] - om[0]))

    def model(w, w0, fwhm, amp, c):
        return amp / (1.0 + ((w - w0) / (0.5 * fwhm)) ** 2) + c

    popt, _ = scipy.optimize.curve_fit(
        model, om, val, p0=(peak, fwhm0, amp0, 0.0), maxfev=20000
    )
    w0, fwhm, amp, c = popt
    return float(w0), abs(float(fwhm)), float(amp), float(c)
