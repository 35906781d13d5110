import numpy as np
import pytest

from lcsync.linalg import (
    TruncationWarning,
    coherent_ket,
    ket_to_dm,
    spin_coherent_ket,
    tensor,
)
from lcsync.phasespace import (
    PhaseGrid,
    husimi_q_boson,
    husimi_q_spin,
    phase_diff_dist_boson,
    phase_diff_dist_spins,
    phase_diff_dist_spins_quadrature,
    phase_dist_boson,
    phase_dist_boson_quadrature,
    phase_dist_spin,
    phase_dist_spin_quadrature,
)

from conftest import random_density

GRID = PhaseGrid(48)


class TestHusimiBoson:
    def test_coherent_state_gaussian(self):
        beta = 0.8 + 0.5j
        rho = ket_to_dm(coherent_ket(beta, 20))
        xs = np.linspace(-2.5, 2.5, 21)
        surf = husimi_q_boson(rho, xs, xs)
        alpha = xs[:, None] + 1j * xs[None, :]
        assert np.max(np.abs(surf.values - np.exp(-np.abs(alpha - beta) ** 2) / np.pi)) < 1e-8

    def test_vacuum_at_origin(self):
        rho = np.zeros((5, 5), dtype=complex)
        rho[0, 0] = 1.0
        surf = husimi_q_boson(rho, np.array([0.0]), np.array([0.0]))
        assert surf.values[0, 0] == pytest.approx(1.0 / np.pi)

    def test_positive_and_normalized(self, rng):
        rho = random_density(rng, 8)
        xs = np.linspace(-4.0, 4.0, 61)
        with pytest.warns(TruncationWarning):
            surf = husimi_q_boson(rho, xs, xs)
        assert surf.values.min() > -1e-12
        assert surf.integral() == pytest.approx(1.0, abs=0.02)

    def test_grid_beyond_truncation_warns(self):
        rho = np.eye(4, dtype=complex) / 4.0
        with pytest.warns(TruncationWarning):
            husimi_q_boson(rho, np.linspace(-3, 3, 7), np.linspace(-3, 3, 7))


class TestPhaseDistBoson:
    def test_fock_diagonal_flat(self, rng):
        probs = rng.uniform(size=6)
        rho = np.diag(probs / probs.sum()).astype(complex)
        dist = phase_dist_boson(rho, GRID)
        assert np.allclose(dist.values, 1.0 / (2 * np.pi), atol=1e-14)

    def test_matches_quadrature(self, rng):
        for _ in range(3):
            rho = random_density(rng, 5)
            closed = phase_dist_boson(rho, GRID)
            quad = phase_dist_boson_quadrature(rho, GRID)
            assert np.max(np.abs(closed.values - quad.values)) < 1e-6

    def test_normalized(self, rng):
        dist = phase_dist_boson(random_density(rng, 7), GRID)
        assert dist.integral() == pytest.approx(1.0, abs=1e-10)

    def test_coherent_peak_at_state_phase(self):
        phi0 = 2.1
        rho = ket_to_dm(coherent_ket(1.5 * np.exp(-1j * phi0), 20))
        dist = phase_dist_boson(rho, PhaseGrid(720))
        assert abs(dist.peak_phi() - phi0) < 2 * np.pi / 720 + 1e-9

    def test_rotation_shifts_grid(self, rng):
        rho = random_density(rng, 6)
        n_op = np.diag(np.arange(6)).astype(complex)
        k = 7
        theta = k * 2 * np.pi / GRID.n_phi
        u = np.diag(np.exp(1j * theta * np.arange(6)))
        rotated = u @ rho @ u.conj().T
        base = phase_dist_boson(rho, GRID)
        shifted = phase_dist_boson(rotated, GRID)
        assert np.allclose(shifted.values, np.roll(base.values, -k), atol=1e-12)


class TestPhaseDiffBoson:
    def test_product_of_symmetric_states_flat(self, rng):
        pa = rng.uniform(size=4)
        pb = rng.uniform(size=4)
        rho = tensor(np.diag(pa / pa.sum()).astype(complex),
                     np.diag(pb / pb.sum()).astype(complex))
        dist = phase_diff_dist_boson(rho, (4, 4), GRID)
        assert np.allclose(dist.values, 1.0 / (2 * np.pi), atol=1e-14)

    def test_product_state_convolution_identity(self, rng):
        # for rho_A x rho_B the difference distribution is the circular
        # cross-correlation of the single-mode distributions
        rho_a = random_density(rng, 4)
        rho_b = random_density(rng, 4)
        dist = phase_diff_dist_boson(tensor(rho_a, rho_b), (4, 4), GRID)
        n = 64 * GRID.n_phi  # fine grid commensurate with the coarse one
        fine = PhaseGrid(n)
        qa = phase_dist_boson(rho_a, fine).values
        qb = phase_dist_boson(rho_b, fine).values
        conv = np.array([
            np.sum(np.roll(qa, -k)[: n] * qb) * (2 * np.pi / n)
            for k in range(0, n, n // GRID.n_phi)
        ])
        # conv[k] = int Q_A(phi_AB + phi) Q_B(phi) d phi at phi_AB = grid point
        assert np.max(np.abs(conv - dist.values)) < 1e-8

    def test_product_coherent_peak_at_phase_difference(self):
        phi_a, phi_b = 1.3, 0.4
        ka = coherent_ket(1.2 * np.exp(-1j * phi_a), 14)
        kb = coherent_ket(1.2 * np.exp(-1j * phi_b), 14)
        rho = ket_to_dm(tensor(ka, kb))
        dist = phase_diff_dist_boson(rho, (15, 15), PhaseGrid(720))
        assert abs(dist.peak_phi() - (phi_a - phi_b)) < 0.02

    def test_normalized(self, rng):
        rho = random_density(rng, 9)
        dist = phase_diff_dist_boson(rho, (3, 3), GRID)
        assert dist.integral() == pytest.approx(1.0, abs=1e-10)


class TestHusimiSpin:
    def test_maximally_mixed_uniform(self):
        rho = np.eye(2, dtype=complex) / 2.0
        surf = husimi_q_spin(rho, np.linspace(0, np.pi, 31), np.linspace(0, 2 * np.pi, 61))
        assert np.allclose(surf.values, 1.0 / (4 * np.pi), atol=1e-14)

    def test_integral_one(self, rng):
        rho = random_density(rng, 2)
        surf = husimi_q_spin(rho, np.linspace(0, np.pi, 101), np.linspace(0, 2 * np.pi, 201))
        assert surf.integral() == pytest.approx(1.0, abs=1e-3)

    def test_coherent_state_peak(self):
        theta0, phi0 = 1.1, 2.7
        rho = ket_to_dm(spin_coherent_ket(theta0, phi0))
        thetas = np.linspace(0, np.pi, 181)
        phis = np.linspace(0, 2 * np.pi, 361)
        surf = husimi_q_spin(rho, thetas, phis)
        i, j = np.unravel_index(np.argmax(surf.values), surf.values.shape)
        assert abs(thetas[i] - theta0) < 0.02
        assert abs(phis[j] - phi0) < 0.02


class TestPhaseDistSpin:
    def test_matches_quadrature(self, rng):
        for _ in range(3):
            rho = random_density(rng, 2)
            closed = phase_dist_spin(rho, GRID)
            quad = phase_dist_spin_quadrature(rho, GRID)
            assert np.max(np.abs(closed.values - quad.values)) < 1e-8

    def test_symmetric_state_flat(self):
        rho = np.diag([1.0 / 3, 2.0 / 3]).astype(complex)
        dist = phase_dist_spin(rho, GRID)
        assert np.allclose(dist.values, 1.0 / (2 * np.pi))

    def test_coherent_peak_at_azimuth(self):
        rho = ket_to_dm(spin_coherent_ket(np.pi / 2, 1.9))
        dist = phase_dist_spin(rho, PhaseGrid(720))
        assert abs(dist.peak_phi() - 1.9) < 0.01


class TestPhaseDiffSpins:
    def test_no_cross_coherence_flat(self, rng):
        rho = tensor(random_density(rng, 2) * 0 + np.diag([0.4, 0.6]),
                     np.diag([0.7, 0.3])).astype(complex)
        dist = phase_diff_dist_spins(rho, GRID)
        assert np.allclose(dist.values, 1.0 / (2 * np.pi))

    def test_maximal_coherence_bound(self):
        # |10> + |01> Bell-type state has <s+_A s-_B> = 1/2
        psi = np.zeros(4, dtype=complex)
        psi[1] = psi[2] = 1.0 / np.sqrt(2)  # |0>|1> and |1>|0>
        rho = ket_to_dm(psi)
        dist = phase_diff_dist_spins(rho, GRID)
        dev = np.max(np.abs(dist.values - 1.0 / (2 * np.pi)))
        assert dev == pytest.approx(np.pi / 32, abs=1e-12)

    def test_matches_quadrature(self, rng):
        for _ in range(3):
            rho = random_density(rng, 4)
            closed = phase_diff_dist_spins(rho, GRID)
            quad = phase_diff_dist_spins_quadrature(rho, GRID)
            assert np.max(np.abs(closed.values - quad.values)) < 1e-6

    def test_never_exceeds_coherence_bound(self, rng):
        bound = 1.0 / (2 * np.pi) + np.pi / 32
        for _ in range(10):
            dist = phase_diff_dist_spins(random_density(rng, 4), GRID)
            assert dist.values.max() <= bound + 1e-12

    def test_product_peak_at_phase_difference(self):
        ka = spin_coherent_ket(np.pi / 2, 1.1)
        kb = spin_coherent_ket(np.pi / 2, 0.4)
        dist = phase_diff_dist_spins(ket_to_dm(tensor(ka, kb)), PhaseGrid(720))
        assert abs(dist.peak_phi() - 0.7) < 0.01


class TestSteadyStatePhaseStructure:
    def test_ring_shaped_husimi_is_phase_symmetric(self):
        import warnings
        from lcsync.lindblad import build_qvdp_model, steady_state

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rho = steady_state(build_qvdp_model(4.0, 4.0, 0.5, 1.0, 16))
        r = 1.8
        values = []
        for phi in np.linspace(0, 2 * np.pi, 24, endpoint=False):
            surf = husimi_q_boson(rho, np.array([r * np.cos(-phi)]),
                                  np.array([r * np.sin(-phi)]))
            values.append(surf.values[0, 0])
        values = np.array(values)
        assert np.max(np.abs(values - values.mean())) < 1e-8
        # ring shaped: the radial profile peaks well away from the origin
        radii = np.linspace(0.0, 3.0, 31)
        profile = [husimi_q_boson(rho, np.array([r]), np.array([0.0])).values[0, 0]
                   for r in radii]
        assert radii[int(np.argmax(profile))] > 1.0

    def test_pair_locking_grows_with_coupling(self):
        import warnings
        from lcsync.lindblad import build_two_qvdp_model, steady_state

        n_max = 6
        grid = PhaseGrid(96)
        delta = 0.5
        maxima = {}
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for v in (0.0, 1.0, 5.0):
                m = build_two_qvdp_model(delta, v, 3.0, 1.0, 1.0, n_max)
                rho = steady_state(m)
                dist = phase_diff_dist_boson(rho, (n_max + 1, n_max + 1), grid)
                maxima[v] = (dist.values.max(), dist.peak_phi())
        flat = 1.0 / (2 * np.pi)
        assert maxima[0.0][0] == pytest.approx(flat, abs=1e-10)
        assert flat < maxima[1.0][0] < maxima[5.0][0]
        # peak near the noiseless fixed point arcsin(delta/V), within the
        # half-width of the peak
        dist_5 = maxima[5.0]
        half_width = 0.0
        m = build_two_qvdp_model(delta, 5.0, 3.0, 1.0, 1.0, n_max)
        import warnings as w2
        with w2.catch_warnings():
            w2.simplefilter("ignore")
            from lcsync.lindblad import steady_state as ss
            dist = phase_diff_dist_boson(ss(m), (n_max + 1, n_max + 1), grid)
        above = dist.values > 0.5 * (dist.values.max() + flat)
        half_width = max(above.sum() * np.pi / grid.n_phi, 0.3)
        target = np.arcsin(delta / 5.0)
        dev = abs((dist_5[1] - target + np.pi) % (2 * np.pi) - np.pi)
        assert dev <= half_width
