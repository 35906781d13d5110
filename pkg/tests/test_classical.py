import numpy as np
import pytest

from lcsync.classical import (
    CoupledPhaseParams,
    VdpParams,
    classical_spectrum,
    fit_lorentzian,
    histogram_phase,
    histogram_xy,
    observed_frequency_difference,
    simulate_coupled_phases,
    simulate_vdp,
)


def _rk4_vdp_reference(params: VdpParams, alpha0: complex, dt: float, t_final: float):
    """Independent deterministic integrator for the noiseless equation."""

    def f(a):
        return (-1j * params.omega + 0.5 * params.kappa1) * a - params.kappa2 * abs(a) ** 2 * a

    a = complex(alpha0)
    n = round(t_final / dt)
    for _ in range(n):
        k1 = f(a)
        k2 = f(a + 0.5 * dt * k1)
        k3 = f(a + 0.5 * dt * k2)
        k4 = f(a + dt * k3)
        a += (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return a


class TestSimulateVdp:
    def test_radius_attracted_to_limit_cycle(self):
        p = VdpParams(1.0, 1.0, 2.0, 0.0)
        rec = simulate_vdp(p, 2.0 + 0j, 1e-3, 20.0, 1, seed=1)[0]
        tail = np.abs(rec.values[rec.times > 5.0])
        assert np.all(np.abs(tail - p.r0) < 1e-2 * p.r0)

    def test_any_start_converges(self):
        p = VdpParams(1.0, 1.0, 2.0, 0.0)
        for alpha0 in (0.1, 3.0, -1.0j):
            rec = simulate_vdp(p, alpha0, 1e-3, 20.0, 1, seed=1)[0]
            assert abs(abs(rec.values[-1]) - p.r0) < 0.01 * p.r0

    def test_ensemble_mean_decays(self):
        p = VdpParams(1.0, 1.0, 2.0, 0.1)
        recs = simulate_vdp(p, 1.0 + 0j, 5e-3, 30.0, 800, seed=2, sample_every=10)
        mean_x = np.mean([r.values.real for r in recs], axis=0)
        assert abs(mean_x[0]) == pytest.approx(1.0)
        assert np.max(np.abs(mean_x[recs[0].times > 25.0])) < 0.1

    def test_euler_matches_rk4_with_first_order_error(self):
        p = VdpParams(1.0, 1.0, 2.0, 0.0)
        ref = _rk4_vdp_reference(p, 1.5 + 0.5j, 1e-4, 2.0)
        errs = []
        for dt in (2e-3, 1e-3):
            rec = simulate_vdp(p, 1.5 + 0.5j, dt, 2.0, 1, seed=1)[0]
            errs.append(abs(rec.values[-1] - ref))
        assert errs[1] < errs[0]
        assert 1.5 < errs[0] / errs[1] < 2.8  # halving dt about halves the error

    def test_reproducible(self):
        p = VdpParams(1.0, 1.0, 2.0, 0.2)
        a = simulate_vdp(p, 1.0, 1e-3, 1.0, 3, seed=9)
        b = simulate_vdp(p, 1.0, 1e-3, 1.0, 3, seed=9)
        for ra, rb in zip(a, b):
            assert np.array_equal(ra.values, rb.values)

    def test_rejects_bad_input(self):
        p = VdpParams(1.0, 1.0, 2.0, 0.0)
        with pytest.raises(ValueError):
            simulate_vdp(p, 1.0, -1e-3, 1.0, 1, seed=1)
        with pytest.raises(ValueError):
            simulate_vdp(p, 1.0, 1e-3, 0.0, 1, seed=1)
        with pytest.raises(ValueError):
            simulate_vdp(p, complex(np.nan, 0.0), 1e-3, 1.0, 1, seed=1)

    def test_error_scales_with_ensemble_size(self):
        # standard error of the mean shrinks ~1/sqrt(n): compare n and 4n batches
        p = VdpParams(1.0, 1.0, 2.0, 0.1)
        t_sel = 8.0

        def mean_err(n_traj, seed_base, n_rep=6):
            devs = []
            for s in range(n_rep):
                recs = simulate_vdp(p, 1.0, 5e-3, t_sel, n_traj, seed=seed_base + s,
                                    sample_every=20)
                devs.append(np.mean([r.values[-1].real for r in recs]))
            return np.std(devs)

        e_small = mean_err(50, 100)
        e_big = mean_err(200, 200)
        assert e_big < e_small  # 1/sqrt(4) expected, allow slack


class TestCoupledPhases:
    def test_locking_phase(self):
        cp = CoupledPhaseParams(1.0, 2.0, 0.0)
        rec = simulate_coupled_phases(cp, (0.0, 0.0), 1e-4, 20.0, 1, seed=1)[0]
        phi_ab = rec.values[-1, 0] - rec.values[-1, 1]
        assert abs(phi_ab - np.arcsin(0.5)) < 1e-6

    def test_decoupled_linear_drift(self):
        cp = CoupledPhaseParams(0.7, 0.0, 0.0)
        rec = simulate_coupled_phases(cp, (0.2, -0.1), 1e-3, 5.0, 1, seed=1)[0]
        expected = 0.3 + 0.7 * rec.times
        assert np.allclose(rec.values[:, 0] - rec.values[:, 1], expected, atol=1e-9)

    def test_beat_frequency(self):
        cp = CoupledPhaseParams(2.0, 1.0, 0.0)
        recs = simulate_coupled_phases(cp, (0.0, 0.0), 1e-4, 200.0, 1, seed=1)
        f = observed_frequency_difference(recs, 10.0)
        assert abs(f - np.sqrt(3.0)) < 0.01 * np.sqrt(3.0)

    def test_observed_frequency_trivial(self):
        cp = CoupledPhaseParams(0.9, 0.0, 0.0)
        recs = simulate_coupled_phases(cp, (0.0, 0.0), 1e-3, 50.0, 2, seed=3)
        assert observed_frequency_difference(recs, 0.0) == pytest.approx(0.9, abs=1e-9)

    def test_locked_pair_frequency_difference_vanishes(self):
        cp = CoupledPhaseParams(0.5, 2.0, 0.0)
        recs = simulate_coupled_phases(cp, (0.0, 0.0), 1e-3, 60.0, 1, seed=3)
        assert abs(observed_frequency_difference(recs, 20.0)) < 1e-6

    def test_locked_mean_drift_small_with_noise(self):
        cp = CoupledPhaseParams(0.5, 2.0, 0.05)
        recs = simulate_coupled_phases(cp, (0.0, 0.0), 1e-3, 200.0, 16, seed=4)
        f = observed_frequency_difference(recs, 20.0)
        assert abs(f) < 0.05  # small but generally nonzero


class TestHistograms:
    def test_flat_when_uncoupled(self):
        cp = CoupledPhaseParams(0.0, 0.0, 0.5)
        recs = simulate_coupled_phases(cp, (0.0, 0.0), 5e-3, 400.0, 16, seed=5)
        hist = histogram_phase(recs, 50.0, 16)
        # pooled standard error per bin from trajectory-group splits (the
        # per-bin estimate from 4 groups is too noisy on its own)
        groups = [histogram_phase(recs[i::4], 50.0, 16).masses for i in range(4)]
        se = np.sqrt(np.mean(np.var(groups, axis=0))) / 2.0
        dev = np.abs(hist.masses - 1.0 / 16)
        assert np.all(dev < 4.0 * se)

    def test_masses_sum_to_one(self):
        cp = CoupledPhaseParams(0.3, 0.5, 0.2)
        recs = simulate_coupled_phases(cp, (0.0, 0.0), 5e-3, 50.0, 4, seed=6)
        hist = histogram_phase(recs, 5.0, 12)
        assert hist.masses.sum() == pytest.approx(1.0, abs=1e-9)

    def test_peak_near_adler_fixed_point(self):
        # V = 2 delta, sigma2 = delta: most likely phase is arcsin(1/2) = pi/6
        cp = CoupledPhaseParams(1.0, 2.0, 1.0)
        recs = simulate_coupled_phases(cp, (0.0, 0.0), 5e-3, 600.0, 24, seed=7)
        hist = histogram_phase(recs, 30.0, 36)
        centers = hist.centers[0]
        peak = centers[np.argmax(hist.masses)]
        assert abs(peak - np.pi / 6) <= 2 * np.pi / 36

    def test_empty_sample_error(self):
        cp = CoupledPhaseParams(0.0, 0.0, 0.1)
        recs = simulate_coupled_phases(cp, (0.0, 0.0), 1e-3, 1.0, 1, seed=8)
        with pytest.raises(ValueError):
            histogram_phase(recs, 100.0, 8)

    def test_xy_delta_initial_condition(self):
        p = VdpParams(1.0, 1.0, 2.0, 0.1)
        recs = simulate_vdp(p, 1.0 + 0.5j, 1e-3, 1.0, 64, seed=9, sample_every=100)
        edges = np.linspace(-2, 2, 21)
        hist = histogram_xy(recs, 0.0, edges, edges)
        assert hist.masses.max() == pytest.approx(1.0)

    def test_xy_ring_and_rotation_symmetry(self):
        p = VdpParams(1.0, 1.0, 2.0, 0.1)
        recs = simulate_vdp(p, 1.0, 5e-3, 60.0, 4000, seed=10, sample_every=400)
        edges = np.linspace(-1.6, 1.6, 33)
        hist = histogram_xy(recs, 60.0, edges, edges)
        centers = 0.5 * (edges[1:] + edges[:-1])
        xx, pp = np.meshgrid(centers, centers, indexing="ij")
        r = np.sqrt(xx**2 + pp**2)
        r_bins = np.linspace(0, 1.6, 17)
        radial = np.array([
            hist.masses[(r >= r_bins[i]) & (r < r_bins[i + 1])].sum()
            / max(((r >= r_bins[i]) & (r < r_bins[i + 1])).sum(), 1)
            for i in range(16)
        ])
        peak_r = 0.5 * (r_bins[np.argmax(radial)] + r_bins[np.argmax(radial) + 1])
        assert abs(peak_r - p.r0) < 0.2  # within ~one radial bin of r0
        # quarter-turn rotation invariance of the stationary histogram
        rotated = np.rot90(hist.masses)
        assert np.abs(rotated - hist.masses).max() < 6.0 * np.sqrt(hist.masses.max() / hist.n_samples)

    def test_xy_outside_range_error(self):
        p = VdpParams(1.0, 1.0, 2.0, 0.0)
        recs = simulate_vdp(p, 1.0, 1e-3, 1.0, 2, seed=11)
        edges = np.linspace(-2, 2, 11)
        with pytest.raises(ValueError):
            histogram_xy(recs, 5.0, edges, edges)


class TestSpectra:
    def test_pure_rotation_single_bin_peak(self):
        p = VdpParams(1.0, 1.0, 2.0, 0.0)
        recs = simulate_vdp(p, 1.0, 1e-3, 60.0, 1, seed=12, sample_every=10)
        omegas = np.linspace(1.0, 3.0, 101)
        spec = classical_spectrum(recs, 10.0, omegas, tau_max=12.0)[0]
        assert abs(spec.peak_omega() - p.omega) <= omegas[1] - omegas[0]

    def test_uncoupled_pair_peaks_at_natural_frequencies(self):
        cp = CoupledPhaseParams(1.0, 0.0, 0.2)
        recs = simulate_coupled_phases(cp, (0.0, 0.0), 5e-3, 300.0, 24, seed=13)
        omegas = np.linspace(-1.5, 1.5, 151)
        specs = classical_spectrum(recs, 20.0, omegas, tau_max=50.0)
        d_om = omegas[1] - omegas[0]
        assert abs(specs[0].peak_omega() - 0.5) <= d_om
        assert abs(specs[1].peak_omega() + 0.5) <= d_om

    def test_linewidth_regression_band(self):
        # Converged measurement at kappa1 = kappa2 = omega/2 = 10 sigma2: the
        # fitted width sits ~40% above the asymptotic formula sigma2/r0^2
        # (amplitude fluctuations at this noise level); guard the band.
        p = VdpParams(1.0, 1.0, 2.0, 0.1)
        recs = simulate_vdp(p, 1.0, 5e-3, 160.0, 600, seed=14, sample_every=4)
        omegas = np.linspace(1.0, 3.0, 401)
        spec = classical_spectrum(recs, 10.0, omegas, tau_max=60.0)[0]
        w0, fwhm, _, _ = fit_lorentzian(spec, window=0.8)
        assert abs(w0 - p.omega) < 0.05
        assert 0.24 < fwhm < 0.34

    def test_segment_too_short_error(self):
        p = VdpParams(1.0, 1.0, 2.0, 0.1)
        recs = simulate_vdp(p, 1.0, 1e-3, 5.0, 1, seed=15)
        with pytest.raises(ValueError, match="shorter"):
            classical_spectrum(recs, 1.0, np.linspace(1, 3, 11), tau_max=100.0)

    def test_fit_lorentzian_recovers_synthetic(self):
        omegas = np.linspace(-2, 2, 401)
        truth = 3.0 / (1.0 + ((omegas - 0.3) / 0.25) ** 2) + 0.1
        from lcsync.records import SpectrumSeries

        series = SpectrumSeries(omegas, truth, "fft-of-correlation")
        w0, fwhm, amp, c = fit_lorentzian(series)
        assert w0 == pytest.approx(0.3, abs=1e-6)
        assert fwhm == pytest.approx(0.5, abs=1e-6)
        assert amp == pytest.approx(3.0, abs=1e-6)
        assert c == pytest.approx(0.1, abs=1e-6)
