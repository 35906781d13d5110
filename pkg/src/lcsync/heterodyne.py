"""Conditional dynamics under continuous heterodyne detection.

Integrates the stochastic master equation in the demodulated frame of
the local oscillator: the fast reference phase is absorbed, each
monitored channel c = sqrt(rate) L contributes the two-quadrature
innovation

    drho = ... + dZ* (c rho - <c> rho) + dZ (rho c^dag - <c>* rho),
    dZ = (dW_x + i dW_y) / sqrt(2),

with two independent Wiener increments per channel and step, and the
recorded complex current is

    I(t) = <c>_m(t) + dZ/dt = sqrt(rate) <L>_m(t) + (dW_x + i dW_y)/(sqrt(2) dt).

Averaging conditional expectations over trajectories reproduces the
unconditional master equation; the detector-noise part of the current
gives a flat spectral floor of 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .lindblad import LindbladModel, Liouvillian, StepSizeError
from .linalg import assert_density
from .records import HistogramDist, SpectrumSeries

__all__ = [
    "MonitoredChannel",
    "HeterodyneRecord",
    "ChannelMismatchError",
    "evolve_sme",
    "evolve_sme_ensemble",
    "heterodyne_current",
    "measured_phase_distribution",
    "measured_spectrum",
]


class ChannelMismatchError(ValueError):
    """A monitored channel has no matching dissipator in the model."""


@dataclass(frozen=True)
class MonitoredChannel:
    """One continuously monitored loss channel (unit detection efficiency)."""

    operator: np.ndarray
    rate: float
    label: str = ""

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("monitored channel rate must be positive")


@dataclass(frozen=True)
class HeterodyneRecord:
    """One heterodyne quantum trajectory at the recording resolution.

    ``times`` are window starts t_k = k * dt; ``cond_expectations[j, k]``
    is <L_j>_m at t_k; ``signal[j, k]`` is sqrt(rate_j) times the mean of
    <L_j>_m over the window [t_k, t_k + dt); ``noise_sums[j, k]`` is the
    summed complex Wiener increment of that window.  The recorded current
    is signal + noise_sums / dt (see :func:`heterodyne_current`), built
    from the exact increments the integrator consumed.  ``observables``
    holds Tr[O rho_m] at window starts for the requested operators.
    """

    seed: int
    stream: int
    dt: float
    step_dt: float
    times: np.ndarray
    channel_labels: tuple[str, ...]
    cond_expectations: np.ndarray
    signal: np.ndarray
    noise_sums: np.ndarray
    observables: np.ndarray
    obs_labels: tuple[str, ...]
    snapshots: tuple[tuple[float, np.ndarray], ...] = field(default=())


def _match_channels(model: LindbladModel, channels: list[MonitoredChannel]) -> None:
    for ch in channels:
        ok = any(
            rate == ch.rate and np.array_equal(np.asarray(op), np.asarray(ch.operator))
            for op, rate in model.jumps
        )
        if not ok:
            raise ChannelMismatchError(
                f"monitored channel {ch.label or '<unnamed>'} (rate {ch.rate}) does not "
                "match any model dissipator; monitored channels must appear among the "
                "model's jumps with identical operator and rate"
            )


def evolve_sme(
    model: LindbladModel,
    channels: list[MonitoredChannel],
    rho0: np.ndarray,
    dt: float,
    t_final: float,
    seed: int,
    *,
    stream: int = 0,
    sample_every: int = 1,
    observables: list[np.ndarray] | None = None,
    obs_labels: tuple[str, ...] = (),
    snapshot_times: tuple[float, ...] = (),
    trace_tol: float = 1e-6,
    eig_floor: float = -1e-4,
) -> HeterodyneRecord:
    """One heterodyne trajectory of the stochastic master equation.

    Noise comes from ``SeedSequence(seed, spawn_key=(stream,))``; the
    record is bit-reproducible from (model, channels, seed, stream, dt,
    t_final) on one platform and backend.  Snapshot states are validated
    as density operators with the Euler-Maruyama positivity slack
    ``eig_floor``; violations raise :class:`StepSizeError`.
    """
    _match_channels(model, channels)
    if dt <= 0 or t_final <= 0:
        raise ValueError("dt and t_final must be positive")
    liouv = Liouvillian(model)
    d = liouv.dim
    n_steps = max(1, round(t_final / dt))
    n_steps += (-n_steps) % sample_every
    n_samples = n_steps // sample_every

    packed = [_kernels.pack_csr(np.sqrt(ch.rate) * np.asarray(ch.operator)) for ch in channels]
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))
    noise = rng.standard_normal((n_steps, len(channels), 2))

    obs_list = observables if observables is not None else []
    obs = np.ascontiguousarray(
        np.stack(obs_list) if obs_list else np.zeros((0, d, d)), dtype=complex
    )
    snap_steps = np.unique(
        [max(1, min(n_steps, round(t / dt))) for t in snapshot_times]
    ).astype(np.int64) if snapshot_times else np.zeros(0, dtype=np.int64)

    state = np.ascontiguousarray(rho0, dtype=complex).copy()
    out_obs = np.zeros((n_samples, len(obs_list)), dtype=complex)
    out_inst = np.zeros((len(channels), n_samples), dtype=complex)
    out_sig = np.zeros((len(channels), n_samples), dtype=complex)
    out_dz = np.zeros((len(channels), n_samples), dtype=complex)
    out_snaps = np.zeros((len(snap_steps), d, d), dtype=complex)

    status = _kernels.sme_heterodyne(
        liouv.ops, packed, state, dt, n_steps, sample_every, noise, obs,
        out_obs, out_inst, out_sig, out_dz, snap_steps, out_snaps, trace_tol,
    )
    if status:
        raise StepSizeError(
            f"trace drifted beyond {trace_tol:.1e} at step {status} "
            f"(t={status * dt:.6g}) with dt={dt:.3e}; reduce dt"
        )

    snapshots = []
    for k, step in enumerate(snap_steps):
        t = float(step * dt)
        try:
            assert_density(out_snaps[k], trace_tol=1e-8, herm_tol=1e-10,
                           eig_floor=eig_floor, context=f"snapshot t={t:.6g}")
        except ValueError as exc:
            raise StepSizeError(
                f"conditional state invariant violated at t={t:.6g} with "
                f"dt={dt:.3e}; reduce dt ({exc})"
            ) from exc
        snapshots.append((t, out_snaps[k].copy()))

    rates = np.array([ch.rate for ch in channels])
    times = np.arange(n_samples) * (sample_every * dt)
    return HeterodyneRecord(
        seed=seed,
        stream=stream,
        dt=sample_every * dt,
        step_dt=dt,
        times=times,
        channel_labels=tuple(ch.label for ch in channels),
        cond_expectations=out_inst / np.sqrt(rates)[:, None],
        signal=out_sig,
        noise_sums=out_dz,
        observables=out_obs.T,
        obs_labels=obs_labels,
        snapshots=tuple(snapshots),
    )


def evolve_sme_ensemble(
    model: LindbladModel,
    channels: list[MonitoredChannel],
    rho0: np.ndarray,
    dt: float,
    t_final: float,
    n_traj: int,
    seed: int,
    **kwargs,
) -> list[HeterodyneRecord]:
    """Independent trajectories on streams 0..n_traj-1 of the master seed."""
    return [
        evolve_sme(model, channels, rho0, dt, t_final, seed, stream=i, **kwargs)
        for i in range(n_traj)
    ]


def heterodyne_current(record: HeterodyneRecord) -> np.ndarray:
    """Complex currents (n_channels, n_times) at the record's resolution.

    I[j, k] = sqrt(rate_j) mean<L_j>_m + sum(dZ) / dt over window k,
    which equals the mean of the per-step currents of that window.
    """
    return record.signal + record.noise_sums / record.dt


def _filtered_currents(record: HeterodyneRecord, tau_f: float) -> np.ndarray:
    """Single-pole low-pass (exponential moving average) of each current."""
    currents = heterodyne_current(record)
    a = np.exp(-record.dt / tau_f)
    out = np.empty_like(currents)
    acc = np.zeros(currents.shape[0], dtype=complex)
    for k in range(currents.shape[1]):
        acc = a * acc + (1.0 - a) * currents[:, k]
        out[:, k] = acc
    return out


def measured_phase_distribution(
    records: HeterodyneRecord | list[HeterodyneRecord],
    tau_f: float,
    t_min: float,
    n_bins: int,
    *,
    channel_pair: tuple[int, int] = (0, 1),
) -> HistogramDist:
    """Histogram of the current-based phase difference arg[I_B / I_A].

    Each record must hold both monitored channels.  Currents are
    low-pass filtered with time constant ``tau_f`` (raw heterodyne
    currents are detector-noise dominated), the phase difference is
    accumulated for t >= t_min, and samples where either filtered
    magnitude is below 1e-12 are skipped and counted.
    """
    if tau_f <= 0:
        raise ValueError("tau_f must be positive")
    if isinstance(records, HeterodyneRecord):
        records = [records]
    ia, ib = channel_pair
    edges = np.linspace(0.0, 2.0 * np.pi, n_bins + 1)
    counts = np.zeros(n_bins)
    total = 0
    skipped = 0
    for rec in records:
        filt = _filtered_currents(rec, tau_f)
        sel = rec.times >= t_min - 1e-12
        fa, fb = filt[ia, sel], filt[ib, sel]
        good = (np.abs(fa) > 1e-12) & (np.abs(fb) > 1e-12)
        skipped += int(np.sum(~good))
        phi = np.mod(np.angle(fb[good] / fa[good]), 2.0 * np.pi)
        counts += np.histogram(phi, bins=edges)[0]
        total += len(phi)
    if total == 0:
        raise ValueError("no usable samples at t >= t_min")
    return HistogramDist((edges,), counts / total, "phase-difference", total, skipped)


def measured_spectrum(
    records: HeterodyneRecord | list[HeterodyneRecord],
    t_min: float,
    omegas: np.ndarray,
    *,
    channel: int = 0,
    bin_width: float | None = None,
    n_segments: int = 1,
) -> SpectrumSeries:
    """Averaged periodogram of the heterodyne current.

    Estimates the transform (e^{-i omega tau} convention) of
    E[I*(t+tau) I(t)] as (dt/N) |sum_k e^{+i omega t_k} I_k|^2,
    Bartlett-averaged over ``n_segments`` per record and over records.
    With ``bin_width`` set, the estimate is additionally averaged over
    sub-frequencies spanning that window around each requested omega.
    A dark channel (no signal) gives a flat floor of 1.
    """
    if isinstance(records, HeterodyneRecord):
        records = [records]
    omegas = np.asarray(omegas, dtype=float)
    if bin_width is not None:
        n_sub = 9
        offsets = np.linspace(-0.5 * bin_width, 0.5 * bin_width, n_sub)
        eval_omegas = (omegas[:, None] + offsets[None, :]).reshape(-1)
    else:
        eval_omegas = omegas

    acc = np.zeros(len(eval_omegas))
    n_avg = 0
    for rec in records:
        sel = rec.times >= t_min - 1e-12
        current = heterodyne_current(rec)[channel, sel]
        times = rec.times[sel]
        n = len(times) // n_segments
        if n < 2:
            raise ValueError("stationary segment too short for the requested resolution")
        for s in range(n_segments):
            seg = current[s * n : (s + 1) * n]
            t_seg = times[s * n : (s + 1) * n]
            phases = np.exp(1j * np.outer(eval_omegas, t_seg))
            amp = phases @ seg
            acc += (rec.dt / n) * np.abs(amp) ** 2
            n_avg += 1
    values = acc / n_avg
    if bin_width is not None:
        values = values.reshape(len(omegas), -1).mean(axis=1)
    return SpectrumSeries(omegas, values, "current-periodogram", source="heterodyne")
