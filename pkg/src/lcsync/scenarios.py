"""Scenario implementations binding the simulation modules to output files.

Each scenario reproduces one figure family at committed default
parameters (preset files in :mod:`lcsync.presets`, one INI section per
scenario, times in units of a named reference rate).  A run writes flat
CSVs plus JSON sidecars into one directory and finishes with a
``manifest.json`` listing every file with its SHA-256 hash; re-running
with the same configuration reproduces the hashes bit for bit.
"""

from __future__ import annotations

import configparser
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np
import scipy

from . import __version__, _kernels, classical, heterodyne, io, lindblad, phasespace
from .linalg import (
    TruncationWarning,
    coherent_ket,
    fock_operators,
    identity,
    ket_to_dm,
    pauli_operators,
    spin_coherent_ket,
    tensor,
)
from .phasespace import PhaseGrid
from .records import bin_averaged

__all__ = ["ScenarioConfig", "ScenarioError", "SCENARIOS", "SWEEPS",
           "load_config", "run_scenario", "run_sweep"]


class ScenarioError(ValueError):
    """Unknown scenario id or invalid configuration."""


@dataclass
class ScenarioConfig:
    scenario: str
    params: dict
    out_dir: Path
    seed: int
    strict: bool = False


def _parse_value(raw: str):
    raw = raw.strip()
    if "," in raw:
        return [_parse_value(v) for v in raw.split(",")]
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def _preset_params(scenario: str) -> dict:
    ref = resources.files("lcsync.presets").joinpath(f"{scenario}.ini")
    if not ref.is_file():
        raise ScenarioError(
            f"unknown scenario {scenario!r}; valid ids: {sorted(SCENARIOS) + sorted(SWEEPS)}"
        )
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.read_string(ref.read_text())
    return {k: _parse_value(v) for k, v in cp[scenario].items()}


def load_config(
    scenario: str,
    *,
    config_file: Path | None = None,
    overrides: dict | None = None,
    seed: int | None = None,
    out_dir: Path | str = "out",
    strict: bool = False,
) -> ScenarioConfig:
    """Merge preset, optional config file section, and CLI overrides."""
    params = _preset_params(scenario)
    if config_file is not None:
        cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
        cp.read(config_file)
        if scenario in cp:
            params.update({k: _parse_value(v) for k, v in cp[scenario].items()})
    for key, value in (overrides or {}).items():
        if key not in params:
            raise ScenarioError(f"unknown parameter {key!r} for scenario {scenario!r}")
        params[key] = _parse_value(str(value))
    for key, value in params.items():
        if key.endswith(("_list", "_grid", "_times", "_ics")) and not isinstance(value, list):
            params[key] = [value]
    cfg = ScenarioConfig(
        scenario=scenario,
        params=params,
        out_dir=Path(out_dir) / scenario,
        seed=int(seed if seed is not None else params.get("seed", 0)),
        strict=strict,
    )
    _validate(cfg)
    return cfg


def _validate(cfg: ScenarioConfig) -> None:
    p = cfg.params
    for key, value in p.items():
        if key in ("dt", "t_final", "meas_dt", "meas_t_final") and value <= 0:
            raise ScenarioError(f"{key} must be positive")
        if key.startswith(("kappa", "gamma")) and not key.endswith("_list") and value < 0:
            raise ScenarioError(f"{key} must be nonnegative")


def _versions() -> dict:
    return {
        "lcsync": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "kernel_backend": _kernels.backend_name(),
    }


def run_scenario(cfg: ScenarioConfig) -> Path:
    """Execute a scenario, write its products, and return the manifest path."""
    if cfg.scenario not in SCENARIOS:
        raise ScenarioError(
            f"unknown scenario {cfg.scenario!r}; valid ids: {sorted(SCENARIOS)}"
        )
    fn, _desc, _figs = SCENARIOS[cfg.scenario]
    mb = io.ManifestBuilder(cfg.out_dir, cfg.scenario, cfg.params, cfg.seed, _versions())
    with warnings.catch_warnings():
        if cfg.strict:
            warnings.simplefilter("error", TruncationWarning)
        fn(cfg, mb)
    return mb.write()


# --- classical ---------------------------------------------------------------


def _run_classical_lc(cfg: ScenarioConfig, mb: io.ManifestBuilder) -> None:
    p = cfg.params
    params = classical.VdpParams(p["kappa1"], p["kappa2"], p["omega"], p["sigma2"])
    alpha0 = complex(p["alpha0_re"], p["alpha0_im"])
    dts = p["dt"] * p["sample_every"]
    meta = {"params": p, "time_unit": "1/kappa1"}

    import dataclasses

    quiet = classical.VdpParams(p["kappa1"], p["kappa2"], p["omega"], 0.0)
    noiseless = [
        dataclasses.replace(
            classical.simulate_vdp(quiet, complex(a0), p["dt"], p["t_final"], 1, cfg.seed,
                                   sample_every=p["sample_every"])[0],
            stream=i,
        )
        for i, a0 in enumerate(p["noiseless_ics"])
    ]
    mb.add_csv("noiseless_trajectories.csv", *io.trajectory_csv(noiseless, "1/kappa1"),
               sidecar=meta)

    recs = classical.simulate_vdp(params, alpha0, p["dt"], p["t_final"], p["n_traj"],
                                  cfg.seed, sample_every=p["sample_every"])
    mb.add_csv("trajectories.csv", *io.trajectory_csv(recs[: p["n_plot_traj"]], "1/kappa1"),
               sidecar=meta)

    mean_re = np.mean([r.values.real for r in recs], axis=0)
    ref = classical.simulate_vdp(quiet, alpha0, p["dt"], p["t_final"], 1, cfg.seed,
                                 sample_every=p["sample_every"])[0]
    mb.add_csv(
        "mean_x.csv",
        *io.series_csv(recs[0].times,
                       {"mean_re_alpha": mean_re, "noiseless_re_alpha": ref.values.real},
                       "1/kappa1"),
        sidecar=meta,
    )

    extent, ng = p["grid_extent"], p["grid_n"]
    edges = np.linspace(-extent, extent, ng + 1)
    for t_snap in p["snapshot_times"]:
        t_snap = round(t_snap / dts) * dts
        idx = int(round(t_snap / dts))
        tag = f"{t_snap:g}".replace(".", "p")
        hist = classical.histogram_xy(recs, t_snap, edges, edges)
        mb.add_csv(f"pxp_t{tag}.csv", *io.histogram_csv(hist),
                   sidecar={**meta, "t": t_snap})
        # phase histogram of the snapshot: one sample per trajectory
        snap_recs = [
            classical.TrajectoryRecord(r.seed, r.stream, r.dt,
                                       r.times[idx : idx + 1],
                                       r.values[idx : idx + 1], r.kind)
            for r in recs
        ]
        ph = classical.histogram_phase(snap_recs, 0.0, p["n_bins"])
        mb.add_csv(f"phase_hist_t{tag}.csv", *io.histogram_csv(ph),
                   sidecar={**meta, "t": t_snap})


def _run_classical_two(cfg: ScenarioConfig, mb: io.ManifestBuilder) -> None:
    p = cfg.params
    delta = p["delta"]
    meta = {"params": p, "time_unit": "1/delta"}

    for v in p["v_list"]:
        cp = classical.CoupledPhaseParams(delta, v, p["sigma2"])
        recs = classical.simulate_coupled_phases(cp, (0.0, 0.0), p["dt"], p["t_final"],
                                                 p["n_traj"], cfg.seed)
        hist = classical.histogram_phase(recs, p["t_min"], p["n_bins"])
        tag = f"{v:g}".replace(".", "p")
        mb.add_csv(f"phase_hist_V{tag}.csv", *io.histogram_csv(hist),
                   sidecar={**meta, "coupling": v,
                            "lock_phase_noiseless": float(np.arcsin(min(delta / v, 1.0)))
                            if v > 0 else None})

    deltas = np.linspace(0.0, p["freq_delta_max"], p["freq_delta_n"])
    cols = {"analytic_noiseless": np.sqrt(np.maximum(deltas**2 - p["freq_v"] ** 2, 0.0))}
    for s2 in p["freq_sigma2_list"]:
        obs = []
        for d in deltas:
            cp = classical.CoupledPhaseParams(d, p["freq_v"], s2)
            recs = classical.simulate_coupled_phases(cp, (0.0, 0.0), p["dt"],
                                                     p["freq_t_final"], p["n_traj"], cfg.seed)
            obs.append(classical.observed_frequency_difference(recs, p["t_min"]))
        cols[f"observed_sigma2_{s2:g}"] = np.array(obs)
    names = ["delta"] + list(cols.keys())
    mb.add_csv("observed_frequency.csv", names, [deltas] + list(cols.values()),
               sidecar={**meta, "coupling": p["freq_v"]})

    omegas = np.linspace(-p["spec_omega_max"], p["spec_omega_max"], p["spec_omega_n"])
    for v in p["spec_v_list"]:
        cp = classical.CoupledPhaseParams(delta, v, p["spec_sigma2"])
        recs = classical.simulate_coupled_phases(cp, (0.0, 0.0), p["dt"], p["t_final"],
                                                 p["n_traj"], cfg.seed)
        specs = classical.classical_spectrum(recs, p["t_min"], omegas)
        tag = f"{v:g}".replace(".", "p")
        for label, spec in zip("AB", specs):
            spec_b = bin_averaged(spec, p["spec_bin_width"])
            mb.add_csv(f"spectrum_V{tag}_{label}.csv", *io.spectrum_csv(spec_b, "delta"),
                       sidecar={**meta, "coupling": v, "oscillator": label,
                                "bin_width": p["spec_bin_width"]})


# --- quantum vdP -------------------------------------------------------------


def _run_qvdp_lc(cfg: ScenarioConfig, mb: io.ManifestBuilder) -> None:
    p = cfg.params
    n_max = p["n_max"]
    model = lindblad.build_qvdp_model(p["omega"], p["kappa1"], p["kappa2"], p["kappa"], n_max)
    a, _, nop = fock_operators(n_max)
    rho0 = ket_to_dm(coherent_ket(complex(p["alpha0_re"], p["alpha0_im"]), n_max))
    meta = {"params": p, "time_unit": "1/kappa", "n_max": n_max, "dt": p["dt"]}

    t_grid = sorted(p["snapshot_times"])
    t_end = max(t_grid)
    sample_every = max(1, round(min(t for t in t_grid if t > 0) / p["dt"] / 10))
    states = lindblad.evolve_me(model, rho0, p["dt"], t_end, sample_every)
    times = np.array([t for t, _ in states])
    grid = PhaseGrid(p["n_phi"])
    xs = np.linspace(-p["grid_extent"], p["grid_extent"], p["grid_n"])
    for t_snap in t_grid:
        idx = int(np.argmin(np.abs(times - t_snap)))
        t_s, rho = states[idx]
        tag = f"{t_snap:g}".replace(".", "p")
        surf = phasespace.husimi_q_boson(rho, xs, xs)
        mb.add_csv(f"husimi_t{tag}.csv", *io.qsurface_csv(surf), sidecar={**meta, "t": t_s})
        dist = phasespace.phase_dist_boson(rho, grid)
        mb.add_csv(f"phase_dist_t{tag}.csv", *io.phase_distribution_csv(dist),
                   sidecar={**meta, "t": t_s})

    exp_a = np.array([np.einsum("ij,ji->", a, rho) for _, rho in states])
    exp_n = np.array([np.einsum("ij,ji->", nop, rho).real for _, rho in states])
    mb.add_csv("expectations.csv",
               *io.series_csv(times, {"re_a": exp_a.real, "im_a": exp_a.imag, "n": exp_n},
                              "1/kappa"),
               sidecar=meta)


def _run_qvdp_traj(cfg: ScenarioConfig, mb: io.ManifestBuilder) -> None:
    p = cfg.params
    n_max = p["n_max"]
    model = lindblad.build_qvdp_model(p["omega"], p["kappa1"], p["kappa2"], p["kappa"], n_max)
    a, a_dag, _ = fock_operators(n_max)
    x_op = 0.5 * (a + a_dag)
    p_op = -0.5j * (a - a_dag)
    rho0 = ket_to_dm(coherent_ket(complex(p["alpha0_re"], p["alpha0_im"]), n_max))
    channels = [heterodyne.MonitoredChannel(a, p["kappa"], "A")]
    meta = {"params": p, "time_unit": "1/kappa", "n_max": n_max, "dt": p["dt"]}

    recs = heterodyne.evolve_sme_ensemble(
        model, channels, rho0, p["dt"], p["t_final"], p["n_traj"], cfg.seed,
        sample_every=p["sample_every"], observables=[x_op, p_op], obs_labels=("x", "p"),
    )
    times = recs[0].times
    names = ["trajectory", "t [1/kappa]", "x_m", "p_m"]
    cols = [
        np.concatenate([np.full(len(times), r.stream) for r in recs[: p["n_plot_traj"]]]),
        np.concatenate([times for _ in recs[: p["n_plot_traj"]]]),
        np.concatenate([r.observables[0].real for r in recs[: p["n_plot_traj"]]]),
        np.concatenate([r.observables[1].real for r in recs[: p["n_plot_traj"]]]),
    ]
    mb.add_csv("trajectories.csv", names, cols, sidecar=meta)

    mean_x = np.mean([r.observables[0].real for r in recs], axis=0)
    me_times, me_vals = lindblad.evolve_expectations(
        model, rho0, p["dt"], p["t_final"], [x_op], sample_every=p["sample_every"])
    mb.add_csv("mean_vs_me.csv",
               *io.series_csv(times, {"mean_x_m": mean_x,
                                      "me_x": me_vals[: len(times), 0].real}, "1/kappa"),
               sidecar={**meta, "n_traj": p["n_traj"]})

    mb.add_csv("heterodyne_record.csv",
               *io.heterodyne_record_csv(recs[0], "1/kappa"),
               sidecar={**meta, "seed": recs[0].seed, "stream": recs[0].stream,
                        "record_dt": recs[0].dt})

    rho_ss = lindblad.steady_state(model)
    xs = np.linspace(-p["grid_extent"], p["grid_extent"], p["grid_n"])
    surf = phasespace.husimi_q_boson(rho_ss, xs, xs)
    mb.add_csv("husimi_ss.csv", *io.qsurface_csv(surf), sidecar=meta)


def _run_qvdp_two(cfg: ScenarioConfig, mb: io.ManifestBuilder) -> None:
    p = cfg.params
    grid = PhaseGrid(p["n_phi"])
    meta = {"params": p, "time_unit": "1/kappa2"}

    # phase locking: closed-form Q(phi_AB) and current-based estimates
    n_max = p["lock_n_max"]
    dims = (n_max + 1, n_max + 1)
    for v in p["lock_v_list"]:
        model = lindblad.build_two_qvdp_model(p["lock_delta"], v, p["kappa1"],
                                              p["kappa2"], p["kappa"], n_max)
        rho_ss = lindblad.steady_state(model)
        dist = phasespace.phase_diff_dist_boson(rho_ss, dims, grid)
        tag = f"{v:g}".replace(".", "p")
        mb.add_csv(f"qphase_V{tag}.csv", *io.phase_distribution_csv(dist),
                   sidecar={**meta, "coupling": v, "n_max": n_max})

    nm = p["meas_n_max"]
    a1, _, _ = fock_operators(nm)
    eye = identity(nm + 1)
    a_op, b_op = tensor(a1, eye), tensor(eye, a1)
    for v in p["lock_v_list"]:
        model = lindblad.build_two_qvdp_model(p["lock_delta"], v, p["kappa1"],
                                              p["kappa2"], p["kappa"], nm)
        channels = [heterodyne.MonitoredChannel(a_op, p["kappa"], "A"),
                    heterodyne.MonitoredChannel(b_op, p["kappa"], "B")]
        rho0 = lindblad.steady_state(model, method="evolve", evolve_tol=1e-8)
        recs = heterodyne.evolve_sme_ensemble(
            model, channels, rho0, p["meas_dt"], p["meas_t_final"],
            p["meas_n_traj"], cfg.seed, sample_every=4)
        hist = heterodyne.measured_phase_distribution(
            recs, p["filter_tau"], p["meas_t_min"], p["meas_n_bins"])
        tag = f"{v:g}".replace(".", "p")
        mb.add_csv(f"measured_phase_V{tag}.csv", *io.histogram_csv(hist),
                   sidecar={**meta, "coupling": v, "n_max": nm,
                            "filter_tau": p["filter_tau"]})

    # frequency entrainment: regression spectra and current periodograms
    ns = p["spec_n_max"]
    a1s, _, _ = fock_operators(ns)
    eyes = identity(ns + 1)
    ops = {"A": tensor(a1s, eyes), "B": tensor(eyes, a1s)}
    omegas = np.linspace(-p["spec_omega_max"], p["spec_omega_max"], p["spec_omega_n"])
    for v in p["spec_v_list"]:
        model = lindblad.build_two_qvdp_model(p["spec_delta"], v, p["kappa1"],
                                              p["kappa2"], p["kappa"], ns)
        liouv = lindblad.Liouvillian(model)
        rho_ss = lindblad.steady_state(liouv)
        tag = f"{v:g}".replace(".", "p")
        for label, op in ops.items():
            spec = lindblad.correlation_spectrum(
                liouv, rho_ss, op.conj().T.copy(), op,
                p["spec_tau_max"], p["spec_d_tau"], omegas)
            mb.add_csv(f"spectrum_V{tag}_{label}.csv", *io.spectrum_csv(spec, "kappa2"),
                       sidecar={**meta, "coupling": v, "oscillator": label, "n_max": ns})

    nmm = p["meas_n_max"]
    for v in p["spec_v_list"]:
        model = lindblad.build_two_qvdp_model(p["spec_delta"], v, p["kappa1"],
                                              p["kappa2"], p["kappa"], nmm)
        channels = [heterodyne.MonitoredChannel(a_op, p["kappa"], "A"),
                    heterodyne.MonitoredChannel(b_op, p["kappa"], "B")]
        rho0 = lindblad.steady_state(model, method="evolve", evolve_tol=1e-8)
        recs = heterodyne.evolve_sme_ensemble(
            model, channels, rho0, p["meas_dt"], p["spec_meas_t_final"],
            p["spec_meas_n_traj"], cfg.seed + 1, sample_every=4)
        tag = f"{v:g}".replace(".", "p")
        for j, label in enumerate("AB"):
            # raw periodogram; display-time averaging (width delta/10) is the
            # renderer's job, so it is not baked into the data
            spec = heterodyne.measured_spectrum(recs, p["meas_t_min"], omegas, channel=j)
            mb.add_csv(f"measured_spectrum_V{tag}_{label}.csv",
                       *io.spectrum_csv(spec, "kappa2"),
                       sidecar={**meta, "coupling": v, "oscillator": label,
                                "caption_bin_width": p["spec_bin_width"], "n_max": nmm})


# --- spins -------------------------------------------------------------------


def _run_spin_lc(cfg: ScenarioConfig, mb: io.ManifestBuilder) -> None:
    p = cfg.params
    model = lindblad.build_spin_model(p["omega"], p["gamma_plus"], p["gamma_minus"])
    sx, _, sz, sp_op, _ = pauli_operators()
    rho0 = ket_to_dm(spin_coherent_ket(p["theta0"], p["phi0"]))
    meta = {"params": p, "time_unit": "1/gamma_minus", "dt": p["dt"]}

    t_grid = sorted(p["snapshot_times"])
    sample_every = max(1, round(min(t for t in t_grid if t > 0) / p["dt"] / 10))
    states = lindblad.evolve_me(model, rho0, p["dt"], max(t_grid), sample_every)
    times = np.array([t for t, _ in states])
    thetas = np.linspace(0.0, np.pi, p["n_theta"])
    phis = np.linspace(0.0, 2.0 * np.pi, p["surface_n_phi"])
    grid = PhaseGrid(p["n_phi"])
    for t_snap in t_grid:
        idx = int(np.argmin(np.abs(times - t_snap)))
        t_s, rho = states[idx]
        tag = f"{t_snap:g}".replace(".", "p")
        surf = phasespace.husimi_q_spin(rho, thetas, phis)
        mb.add_csv(f"mollweide_t{tag}.csv", *io.qsurface_csv(surf),
                   sidecar={**meta, "t": t_s})
        dist = phasespace.phase_dist_spin(rho, grid)
        mb.add_csv(f"phase_dist_t{tag}.csv", *io.phase_distribution_csv(dist),
                   sidecar={**meta, "t": t_s})

    exps = np.array([[np.einsum("ij,ji->", o, rho).real for o in (sx, sz)]
                     for _, rho in states])
    mb.add_csv("expectations.csv",
               *io.series_csv(times, {"sx": exps[:, 0], "sz": exps[:, 1]}, "1/gamma_minus"),
               sidecar=meta)


def _run_spin_traj(cfg: ScenarioConfig, mb: io.ManifestBuilder) -> None:
    p = cfg.params
    model = lindblad.build_spin_model(p["omega"], p["gamma_plus"], p["gamma_minus"])
    sx, _, sz, sp_op, sm_op = pauli_operators()
    rho0 = ket_to_dm(spin_coherent_ket(p["theta0"], p["phi0"]))
    channels = [heterodyne.MonitoredChannel(sm_op, p["gamma_minus"], "A")]
    meta = {"params": p, "time_unit": "1/gamma_minus", "dt": p["dt"]}

    recs = heterodyne.evolve_sme_ensemble(
        model, channels, rho0, p["dt"], p["t_final"], p["n_traj"], cfg.seed,
        sample_every=p["sample_every"],
        observables=[sx, sz, sp_op], obs_labels=("sx", "sz", "sp"))
    times = recs[0].times
    names = ["trajectory", "t [1/gamma_minus]", "sx_m", "sz_m"]
    cols = [
        np.concatenate([np.full(len(times), r.stream) for r in recs[: p["n_plot_traj"]]]),
        np.concatenate([times for _ in recs[: p["n_plot_traj"]]]),
        np.concatenate([r.observables[0].real for r in recs[: p["n_plot_traj"]]]),
        np.concatenate([r.observables[1].real for r in recs[: p["n_plot_traj"]]]),
    ]
    mb.add_csv("trajectories.csv", names, cols, sidecar=meta)

    mean_sx = np.mean([r.observables[0].real for r in recs], axis=0)
    _, me_vals = lindblad.evolve_expectations(
        model, rho0, p["dt"], p["t_final"], [sx], sample_every=p["sample_every"])
    mb.add_csv("mean_vs_me.csv",
               *io.series_csv(times, {"mean_sx_m": mean_sx,
                                      "me_sx": me_vals[: len(times), 0].real},
                              "1/gamma_minus"),
               sidecar={**meta, "n_traj": p["n_traj"]})

    mb.add_csv("heterodyne_record.csv",
               *io.heterodyne_record_csv(recs[0], "1/gamma_minus"),
               sidecar={**meta, "seed": recs[0].seed, "stream": recs[0].stream,
                        "record_dt": recs[0].dt})

    # Bloch path of the first trajectory: theta = arccos<sz>_m, phi = arg<sp>_m
    r0 = recs[0]
    theta_m = np.arccos(np.clip(r0.observables[1].real, -1.0, 1.0))
    phi_m = np.mod(np.angle(r0.observables[2]), 2.0 * np.pi)
    mb.add_csv("bloch_path.csv",
               *io.series_csv(times, {"theta_m [rad]": theta_m, "phi_m [rad]": phi_m},
                              "1/gamma_minus"),
               sidecar=meta)

    rho_ss = lindblad.steady_state(model)
    thetas = np.linspace(0.0, np.pi, p["n_theta"])
    phis = np.linspace(0.0, 2.0 * np.pi, p["surface_n_phi"])
    surf = phasespace.husimi_q_spin(rho_ss, thetas, phis)
    mb.add_csv("husimi_ss.csv", *io.qsurface_csv(surf), sidecar=meta)


def _run_spin_two(cfg: ScenarioConfig, mb: io.ManifestBuilder) -> None:
    p = cfg.params
    grid = PhaseGrid(p["n_phi"])
    _, _, sz, sp_op, sm_op = pauli_operators()
    eye2 = identity(2)
    sm_a, sm_b = tensor(sm_op, eye2), tensor(eye2, sm_op)
    sp_a, sp_b = tensor(sp_op, eye2), tensor(eye2, sp_op)
    meta = {"params": p, "time_unit": "1/gamma_minus"}

    for v in p["lock_v_list"]:
        model = lindblad.build_two_spin_model(p["lock_delta"], v, p["gamma_plus"],
                                              p["gamma_minus"])
        rho_ss = lindblad.steady_state(model)
        dist = phasespace.phase_diff_dist_spins(rho_ss, grid)
        tag = f"{v:g}".replace(".", "p")
        mb.add_csv(f"qphase_V{tag}.csv", *io.phase_distribution_csv(dist),
                   sidecar={**meta, "coupling": v})

        channels = [heterodyne.MonitoredChannel(sm_a, p["gamma_minus"], "A"),
                    heterodyne.MonitoredChannel(sm_b, p["gamma_minus"], "B")]
        recs = heterodyne.evolve_sme_ensemble(
            model, channels, np.ascontiguousarray(rho_ss), p["meas_dt"],
            p["meas_t_final"], p["meas_n_traj"], cfg.seed, sample_every=4)
        hist = heterodyne.measured_phase_distribution(
            recs, p["filter_tau"], p["meas_t_min"], p["meas_n_bins"])
        mb.add_csv(f"measured_phase_V{tag}.csv", *io.histogram_csv(hist),
                   sidecar={**meta, "coupling": v, "filter_tau": p["filter_tau"]})

    omegas = np.linspace(-p["spec_omega_max"], p["spec_omega_max"], p["spec_omega_n"])
    for v in p["spec_v_list"]:
        model = lindblad.build_two_spin_model(p["spec_delta"], v, p["gamma_plus"],
                                              p["gamma_minus"])
        liouv = lindblad.Liouvillian(model)
        rho_ss = lindblad.steady_state(liouv)
        tag = f"{v:g}".replace(".", "p")
        for label, op_plus, op_minus in (("A", sp_a, sm_a), ("B", sp_b, sm_b)):
            spec = lindblad.correlation_spectrum(
                liouv, rho_ss, op_plus, op_minus,
                p["spec_tau_max"], p["spec_d_tau"], omegas)
            mb.add_csv(f"spectrum_V{tag}_{label}.csv",
                       *io.spectrum_csv(spec, "gamma_minus"),
                       sidecar={**meta, "coupling": v, "oscillator": label})


SCENARIOS = {
    "classical-lc": (_run_classical_lc, "single noisy classical limit cycle", "fig1,fig2,fig3"),
    "classical-two": (_run_classical_two, "two coupled noisy phase oscillators", "fig4,fig5"),
    "qvdp-lc": (_run_qvdp_lc, "quantum vdP master-equation evolution", "fig6"),
    "qvdp-traj": (_run_qvdp_traj, "quantum vdP heterodyne trajectories", "fig7"),
    "qvdp-two": (_run_qvdp_two, "two coupled quantum vdP oscillators", "fig8,fig9"),
    "spin-lc": (_run_spin_lc, "spin-1/2 master-equation evolution", "fig10"),
    "spin-traj": (_run_spin_traj, "spin-1/2 heterodyne trajectories", "fig10"),
    "spin-two": (_run_spin_two, "two coupled spins-1/2", "fig11,fig12"),
}


# --- sweeps ------------------------------------------------------------------


def _sweep_point_classical(args: dict) -> float:
    cp = classical.CoupledPhaseParams(args["delta"], args["coupling"], args["delta"])
    recs = classical.simulate_coupled_phases(
        cp, (0.0, 0.0), args["dt"], args["t_final"], args["n_traj"], args["seed"])
    hist = classical.histogram_phase(recs, args["t_min"], args["n_bins"])
    return float(hist.densities.max())


def _sweep_point_qvdp(args: dict) -> float:
    model = lindblad.build_two_qvdp_model(
        args["delta"], args["coupling"], args["kappa1"], args["kappa2"],
        args["kappa"], args["n_max"])
    rho_ss = lindblad.steady_state(model)
    dims = (args["n_max"] + 1, args["n_max"] + 1)
    dist = phasespace.phase_diff_dist_boson(rho_ss, dims, PhaseGrid(args["n_phi"]))
    return float(dist.values.max())


def _sweep_point_spins(args: dict) -> float:
    model = lindblad.build_two_spin_model(
        args["delta"], args["coupling"], args["gamma_plus"], args["gamma_minus"])
    rho_ss = lindblad.steady_state(model)
    dist = phasespace.phase_diff_dist_spins(rho_ss, PhaseGrid(args["n_phi"]))
    return float(dist.values.max())


SWEEPS = {
    "sweep-classical": (_sweep_point_classical, "max P(phi_AB) over a (delta, V) grid", "fig4"),
    "sweep-qvdp": (_sweep_point_qvdp, "max Q(phi_AB) over a (delta, V) grid", "fig8"),
    "sweep-spins": (_sweep_point_spins, "max Q(phi_AB) over a (delta, V) grid", "fig11"),
}


def _eval_point(point_fn, args: dict, strict: bool) -> tuple[float, str]:
    try:
        with warnings.catch_warnings():
            if strict:
                warnings.simplefilter("error", TruncationWarning)
            return point_fn(args), ""
    except Exception as exc:  # per-point failures land in the table
        return float("nan"), str(exc).replace(",", ";")


def run_sweep(cfg: ScenarioConfig, workers: int = 1) -> Path:
    """Evaluate the phase-locking measure on the (delta, V) grid; write sweep.csv.

    Points are independent; failures are recorded in the ``error`` column
    instead of aborting the sweep.
    """
    if cfg.scenario not in SWEEPS:
        raise ScenarioError(
            f"unknown sweep {cfg.scenario!r}; valid ids: {sorted(SWEEPS)}"
        )
    point_fn, _desc, _figs = SWEEPS[cfg.scenario]
    p = cfg.params
    points = []
    for i, delta in enumerate(p["delta_grid"]):
        for j, v in enumerate(p["v_grid"]):
            args = dict(p)
            args.pop("delta_grid"), args.pop("v_grid")
            args.update(delta=float(delta), coupling=float(v),
                        seed=cfg.seed + i * len(p["v_grid"]) + j)
            points.append(args)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_eval_point_star,
                                    [(point_fn, a, cfg.strict) for a in points]))
    else:
        results = [_eval_point(point_fn, a, cfg.strict) for a in points]

    mb = io.ManifestBuilder(cfg.out_dir, cfg.scenario, cfg.params, cfg.seed, _versions())
    mb.add_csv(
        "sweep.csv",
        ["delta", "coupling", "max_value [1/rad]", "error"],
        [
            np.array([a["delta"] for a in points]),
            np.array([a["coupling"] for a in points]),
            np.array([r[0] for r in results]),
            np.array([r[1] for r in results], dtype=object),
        ],
        sidecar={"params": p, "flat_value": 1.0 / (2.0 * np.pi)},
    )
    return mb.write()


def _eval_point_star(packed):
    return _eval_point(*packed)
