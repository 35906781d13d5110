import numpy as np
import pytest

from lcsync.linalg import (
    TruncationWarning,
    assert_density,
    coherent_ket,
    expect,
    fock_operators,
    identity,
    pauli_operators,
    reduced_populations,
    spin_coherent_ket,
    tensor,
    trace_distance,
)

from conftest import random_density


class TestFockOperators:
    def test_lowest_rung(self):
        a, a_dag, n = fock_operators(1)
        one = np.array([0.0, 1.0], dtype=complex)
        assert np.allclose(a @ one, [1.0, 0.0])

    def test_number_diagonal(self):
        _, _, n = fock_operators(10)
        assert np.allclose(np.diag(n).real, np.arange(11))

    def test_commutator_truncation_artifact(self):
        a, a_dag, _ = fock_operators(10)
        comm = a @ a_dag - a_dag @ a
        diag = np.diag(comm).real
        assert np.allclose(diag[:-1], 1.0, atol=1e-12)
        assert diag[-1] == pytest.approx(-10.0)
        off = comm - np.diag(np.diag(comm))
        assert np.max(np.abs(off)) < 1e-12

    def test_adjoint_consistent(self):
        a, a_dag, n = fock_operators(6)
        assert np.allclose(a_dag, a.conj().T)
        assert np.allclose(n, a_dag @ a)

    def test_rejects_single_level(self):
        with pytest.raises(ValueError):
            fock_operators(0)


class TestPauliOperators:
    def test_anticommutation(self):
        _, _, _, sp, sm = pauli_operators()
        assert np.allclose(sp @ sm + sm @ sp, np.eye(2))

    def test_sz_eigenstate(self):
        _, _, sz, _, _ = pauli_operators()
        one = np.array([0.0, 1.0])
        assert np.allclose(sz @ one, one)

    def test_su2_algebra(self):
        sx, sy, sz, _, _ = pauli_operators()
        assert np.allclose(sx @ sy - sy @ sx, 2j * sz, atol=1e-12)

    def test_hermiticity(self):
        sx, sy, sz, _, _ = pauli_operators()
        for m in (sx, sy, sz):
            assert np.max(np.abs(m - m.conj().T)) < 1e-12


class TestTensor:
    def test_disjoint_factors_commute(self, rng):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        left = tensor(a, identity(4)) @ tensor(identity(3), b)
        right = tensor(identity(3), b) @ tensor(a, identity(4))
        assert np.allclose(left, right)

    def test_identity_product(self):
        assert np.allclose(tensor(identity(2), identity(2)), np.eye(4))

    def test_trace_factorizes(self, rng):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        assert np.trace(tensor(a, b)) == pytest.approx(np.trace(a) * np.trace(b))

    def test_mixed_product_identity(self, rng):
        a, b, c, d = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(4))
        assert np.allclose(tensor(a, b) @ tensor(c, d), tensor(a @ c, b @ d))

    def test_associative(self, rng):
        # small-integer entries keep the entry products exact, so the two
        # association orders must agree bit for bit
        a, b, c = (rng.integers(-4, 5, size=(2, 2)).astype(complex) for _ in range(3))
        assert np.array_equal(tensor(tensor(a, b), c), tensor(a, tensor(b, c)))


class TestCoherentKet:
    def test_vacuum(self):
        ket = coherent_ket(0.0, 5)
        assert np.allclose(ket, np.eye(6)[0])

    def test_lowering_eigenvalue(self):
        a, _, n = fock_operators(20)
        ket = coherent_ket(1.0, 20)
        assert abs(expect(a, ket) - 1.0) < 1e-8
        assert abs(expect(n, ket) - 1.0) < 1e-8

    def test_unit_norm(self):
        for alpha in (0.5, 1.5 + 0.2j, -1.0j):
            assert np.linalg.norm(coherent_ket(alpha, 25)) == pytest.approx(1.0, abs=1e-12)

    def test_truncation_warning(self):
        with pytest.warns(TruncationWarning):
            coherent_ket(3.0, 10)


class TestSpinCoherentKet:
    def test_north_pole(self):
        ket = spin_coherent_ket(0.0, 0.3)
        assert abs(abs(ket[1]) - 1.0) < 1e-12

    def test_south_pole(self):
        ket = spin_coherent_ket(np.pi, 0.7)
        assert abs(abs(ket[0]) - 1.0) < 1e-12

    def test_equator_sx(self):
        sx = pauli_operators()[0]
        ket = spin_coherent_ket(np.pi / 2, 0.0)
        assert expect(sx, ket).real == pytest.approx(1.0, abs=1e-12)

    def test_population_difference(self, rng):
        sz = pauli_operators()[2]
        for theta in rng.uniform(0, np.pi, 5):
            ket = spin_coherent_ket(theta, rng.uniform(0, 2 * np.pi))
            assert expect(sz, ket).real == pytest.approx(np.cos(theta), abs=1e-12)

    def test_rejects_bad_theta(self):
        with pytest.raises(ValueError):
            spin_coherent_ket(-0.1, 0.0)


class TestDensityHelpers:
    def test_assert_density_accepts_valid(self, rng):
        assert_density(random_density(rng, 5))

    def test_assert_density_rejects_trace(self):
        with pytest.raises(ValueError, match="trace"):
            assert_density(2.0 * np.eye(3, dtype=complex) / 3.0)

    def test_assert_density_rejects_negative(self):
        rho = np.diag([1.2, -0.2]).astype(complex)
        with pytest.raises(ValueError, match="negative"):
            assert_density(rho)

    def test_trace_distance_orthogonal(self):
        assert trace_distance(np.diag([1.0, 0j]), np.diag([0.0, 1.0 + 0j])) == pytest.approx(1.0)

    def test_reduced_populations(self, rng):
        rho_a = random_density(rng, 3)
        rho_b = random_density(rng, 4)
        joint = tensor(rho_a, rho_b)
        pops = reduced_populations(joint, (3, 4), 0)
        assert np.allclose(pops, np.diag(rho_a).real)
        pops_b = reduced_populations(joint, (3, 4), 1)
        assert np.allclose(pops_b, np.diag(rho_b).real)

    def test_constructors_readonly(self):
        a, _, _ = fock_operators(3)
        with pytest.raises(ValueError):
            a[0, 0] = 1.0
