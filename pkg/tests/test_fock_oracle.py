import math

import numpy as np
import pytest
from helpers import random_excitation, random_model

from carentropy import (
    DensityMatrix,
    SizeLimitError,
    ValidationError,
    ZeroModeError,
    build_canonical_space,
    build_fock_rep,
    commutator_entropy,
    embed_hamiltonian,
    excited_density,
    gibbs_density,
    ground_polarization,
    heisenberg,
    kms_state,
    q_beta,
    relent_single,
    represent,
    represent_product,
    spectral_excitation,
    two_point,
    umegaki,
    verify_ground_state,
    verify_kms,
)


@pytest.fixture(scope="module")
def rep3():
    return build_fock_rep(random_model(3, seed=201))


def random_vector(rep, seed):
    rng = np.random.default_rng(seed)
    dim = rep.generator.space.dim
    return rng.standard_normal(dim) + 1j * rng.standard_normal(dim)


class TestRepresentation:
    def test_single_mode_hamiltonian(self):
        h = embed_hamiltonian(build_canonical_space(1), [[1.0]])
        rep = build_fock_rep(h)
        np.testing.assert_allclose(rep.hamiltonian, np.diag([0.0, 1.0]), atol=1e-12)

    def test_mode_operators_satisfy_car(self, rep3):
        dim = rep3.dim
        for j, aj in enumerate(rep3.annihilators):
            for k, ak in enumerate(rep3.annihilators):
                acomm = aj @ ak.conj().T + ak.conj().T @ aj
                np.testing.assert_allclose(acomm, (j == k) * np.eye(dim), atol=1e-12)
                np.testing.assert_allclose(aj @ ak + ak @ aj, 0.0, atol=1e-12)

    def test_represented_car_for_random_vectors(self, rep3):
        f = random_vector(rep3, 1)
        g = random_vector(rep3, 2)
        F = represent(rep3, f)
        G = represent(rep3, g)
        acomm = F.conj().T @ G + G @ F.conj().T
        np.testing.assert_allclose(acomm, np.vdot(f, g) * np.eye(rep3.dim), atol=1e-12)

    def test_adjoint_is_conjugated_argument(self, rep3):
        f = random_vector(rep3, 3)
        lhs = represent(rep3, f).conj().T
        rhs = represent(rep3, rep3.generator.space.conjugate(f))
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_mode_vector_maps_to_creation(self, rep3):
        for j in range(rep3.n_modes):
            F = represent(rep3, rep3.mode_vectors[:, j])
            np.testing.assert_allclose(F, rep3.annihilators[j].conj().T, atol=1e-12)

    def test_admissible_vector_is_unitary_involution(self, rep3):
        f = random_excitation(rep3.generator, np.random.default_rng(4))
        F = represent(rep3, f.components)
        np.testing.assert_allclose(F @ F.conj().T, np.eye(rep3.dim), atol=1e-12)
        np.testing.assert_allclose(F @ F, np.eye(rep3.dim), atol=1e-12)

    def test_vacuum_two_point_is_ground_polarization(self, rep3):
        h = rep3.generator
        P = ground_polarization(h)
        vac = rep3.vacuum
        f = random_vector(rep3, 5)
        g = random_vector(rep3, 6)
        lhs = vac.conj() @ represent(rep3, f) @ represent(rep3, g) @ vac
        assert abs(lhs - two_point(P, f, g)) < 1e-12

    def test_flow_intertwining(self, rep3):
        f = random_vector(rep3, 7)
        for t in (-0.9, 0.3, 1.7):
            lhs = heisenberg(rep3, represent(rep3, f), t)
            rhs = represent(rep3, rep3.generator.evolve(f, t))
            assert np.linalg.norm(lhs - rhs) < 1e-10

    def test_zero_mode_rejected(self):
        h = embed_hamiltonian(build_canonical_space(2), np.diag([0.0, 1.0]))
        with pytest.raises(ZeroModeError):
            build_fock_rep(h)

    def test_mode_cap(self):
        with pytest.raises(SizeLimitError):
            build_fock_rep(random_model(4, seed=202), max_modes=3)


class TestGibbs:
    def test_single_mode_weights(self):
        h = embed_hamiltonian(build_canonical_space(1), [[1.0]])
        rho = gibbs_density(build_fock_rep(h), 1.0).matrix
        z = 1 + math.exp(-1.0)
        np.testing.assert_allclose(rho, np.diag([1 / z, math.exp(-1.0) / z]), atol=1e-12)

    def test_fermi_dirac_occupancy(self):
        eps, beta = 1.3, 0.7
        h = embed_hamiltonian(build_canonical_space(1), [[eps]])
        rep = build_fock_rep(h)
        rho = gibbs_density(rep, beta).matrix
        number = rep.annihilators[0].conj().T @ rep.annihilators[0]
        occupancy = np.trace(rho @ number).real
        assert abs(occupancy - 1 / (math.exp(beta * eps) + 1)) < 1e-12

    def test_large_beta_projects_on_vacuum(self):
        h = embed_hamiltonian(build_canonical_space(2), np.diag([1.0, 2.0]))
        rep = build_fock_rep(h)
        rho = gibbs_density(rep, 64.0).matrix
        vac = np.outer(rep.vacuum, rep.vacuum.conj())
        assert np.linalg.norm(rho - vac) < 1e-10

    @pytest.mark.parametrize("beta", [0.25, 1.0, 4.0])
    def test_two_point_matches_thermal_polarization(self, beta):
        h = random_model(4, seed=203)
        rep = build_fock_rep(h)
        rho = gibbs_density(rep, beta).matrix
        Q = q_beta(h, beta)
        rng = np.random.default_rng(204)
        for _ in range(3):
            f = rng.standard_normal(8) + 1j * rng.standard_normal(8)
            g = rng.standard_normal(8) + 1j * rng.standard_normal(8)
            lhs = np.trace(rho @ represent(rep, f) @ represent(rep, g))
            assert abs(lhs - two_point(Q, f, g)) < 1e-10

    def test_bad_beta_rejected(self, rep3):
        with pytest.raises(ValidationError):
            gibbs_density(rep3, -1.0)

    def test_npoint_matches_gibbs_expectation(self, rep3):
        from carentropy import n_point

        beta = 1.3
        state = kms_state(rep3.generator, beta)
        rho = gibbs_density(rep3, beta).matrix
        vectors = [random_vector(rep3, 300 + k) for k in range(4)]
        word = represent_product(rep3, vectors)
        lhs = np.trace(rho @ word)
        assert abs(lhs - n_point(state, vectors)) < 1e-10 * max(1.0, abs(lhs))


class TestExcitedDensity:
    def test_empty_list_is_identity_map(self, rep3):
        rho = gibbs_density(rep3, 1.0)
        same = excited_density(rep3, rho, [])
        np.testing.assert_allclose(same.matrix, rho.matrix, atol=1e-14)

    def test_spectrum_preserved(self, rep3):
        rho = gibbs_density(rep3, 0.5)
        fs = [random_excitation(rep3.generator, np.random.default_rng(8)) for _ in range(2)]
        moved = excited_density(rep3, rho, fs)
        np.testing.assert_allclose(
            np.linalg.eigvalsh(moved.matrix), np.linalg.eigvalsh(rho.matrix), atol=1e-10
        )

    def test_vacuum_flips_to_excited_level(self):
        h = embed_hamiltonian(build_canonical_space(1), [[1.0]])
        rep = build_fock_rep(h)
        vac = DensityMatrix(np.diag([1.0, 0.0]).astype(complex))
        f = spectral_excitation(h, 0)
        moved = excited_density(rep, vac, [f])
        np.testing.assert_allclose(moved.matrix, np.diag([0.0, 1.0]), atol=1e-12)


class TestUmegaki:
    def test_identical_states_give_zero(self, rep3):
        rho = gibbs_density(rep3, 1.0)
        assert abs(umegaki(rho, rho)) < 1e-12

    def test_two_level_closed_form(self):
        sigma = np.diag([1.0, 0.0]).astype(complex)
        tau = np.diag([0.5, 0.5]).astype(complex)
        assert umegaki(sigma, tau) == pytest.approx(math.log(2.0), abs=1e-12)

    def test_single_mode_excitation_matches_closed_form(self):
        h = embed_hamiltonian(build_canonical_space(1), [[1.0]])
        rep = build_fock_rep(h)
        rho = gibbs_density(rep, 1.0)
        f = spectral_excitation(h, 0)
        value = umegaki(rho, excited_density(rep, rho, [f]))
        assert value == pytest.approx(math.tanh(0.5), abs=1e-10)

    def test_nonnegative_on_random_pairs(self, rep3):
        rng = np.random.default_rng(9)
        for _ in range(4):
            a = rng.standard_normal((rep3.dim, rep3.dim)) + 1j * rng.standard_normal((rep3.dim, rep3.dim))
            b = rng.standard_normal((rep3.dim, rep3.dim)) + 1j * rng.standard_normal((rep3.dim, rep3.dim))
            sigma = a @ a.conj().T
            tau = b @ b.conj().T + 1e-3 * np.eye(rep3.dim)
            sigma /= np.trace(sigma).real
            tau /= np.trace(tau).real
            value = umegaki(sigma, tau)
            assert value >= -1e-10
            assert value > 1e-6  # distinct random states are strictly separated

    def test_singular_second_argument_rejected(self):
        sigma = np.diag([0.5, 0.5]).astype(complex)
        tau = np.diag([1.0, 0.0]).astype(complex)
        with pytest.raises(ValidationError, match="support"):
            umegaki(sigma, tau)


class TestCommutatorEntropy:
    def test_empty_word_gives_zero(self, rep3):
        rho = gibbs_density(rep3, 1.0)
        assert commutator_entropy(rep3, rho, []) == pytest.approx(0.0, abs=1e-14)

    def test_matches_single_excitation_entropy(self, rep3):
        h = rep3.generator
        state = kms_state(h, 1.0)
        f = random_excitation(h, np.random.default_rng(10))
        rho = gibbs_density(rep3, 1.0)
        assert abs(commutator_entropy(rep3, rho, [f]) - relent_single(state, f).value) < 1e-8

    def test_matches_umegaki_for_two_excitations(self, rep3):
        rho = gibbs_density(rep3, 1.0)
        fs = [random_excitation(rep3.generator, np.random.default_rng(11)) for _ in range(2)]
        lhs = commutator_entropy(rep3, rho, fs)
        rhs = umegaki(rho, excited_density(rep3, rho, fs))
        assert abs(lhs - rhs) < 1e-10


class TestKMS:
    def test_zero_time_is_trace_cyclicity(self, rep3):
        A = represent(rep3, random_vector(rep3, 12))
        B = represent(rep3, random_vector(rep3, 13))
        assert verify_kms(rep3, 1.0, A, B, 0.0) < 1e-9

    def test_gibbs_residual_vanishes(self, rep3):
        A = represent(rep3, random_vector(rep3, 14))
        B = represent(rep3, random_vector(rep3, 15))
        assert verify_kms(rep3, 1.0, A, B, 0.7) < 1e-9

    def test_non_gibbs_density_fails(self, rep3):
        A = represent(rep3, random_vector(rep3, 16))
        B = represent(rep3, random_vector(rep3, 17))
        mixed = DensityMatrix(np.eye(rep3.dim, dtype=complex) / rep3.dim)
        assert verify_kms(rep3, 1.0, A, B, 0.7, rho=mixed) > 1e-3

    def test_modular_flow_matches_one_particle_flow(self, rep3):
        # conjugation by rho^{it} at beta = 1 must implement u_t
        weights, basis = np.linalg.eigh(gibbs_density(rep3, 1.0).matrix)
        f = random_vector(rep3, 18)
        F = represent(rep3, f)
        for t in (-1.1, 0.6):
            mod = (basis * weights**(1j * t)) @ basis.conj().T
            lhs = mod @ F @ np.conj(mod).T
            rhs = represent(rep3, rep3.generator.evolve(f, t))
            assert np.linalg.norm(lhs - rhs) < 1e-10


class TestGroundState:
    def test_positive_spectrum_passes(self, rep3):
        f = random_excitation(rep3.generator, np.random.default_rng(19))
        F = represent(rep3, f.components)
        assert verify_ground_state(rep3, F, F)

    def test_vacuum_is_invariant(self, rep3):
        assert np.linalg.norm(rep3.hamiltonian @ rep3.vacuum) < 1e-12
        for t in (0.5, 2.0):
            energies, basis = np.linalg.eigh(rep3.hamiltonian)
            U = (basis * np.exp(-1j * t * energies)) @ basis.conj().T
            assert np.linalg.norm(U @ rep3.vacuum - rep3.vacuum) < 1e-12

    def test_shifted_hamiltonian_fails(self, rep3):
        f = spectral_excitation(rep3.generator, 0)
        F = represent(rep3, f.components)
        number = rep3.annihilators[0].conj().T @ rep3.annihilators[0]
        shift = float(rep3.mode_energies.max()) + 1.0
        assert not verify_ground_state(rep3, F, F, hamiltonian=rep3.hamiltonian - shift * number)


def test_product_representation_order(rep3):
    fs = [random_excitation(rep3.generator, np.random.default_rng(s)) for s in (20, 21)]
    word = represent_product(rep3, [f.components for f in fs])
    np.testing.assert_allclose(
        word, represent(rep3, fs[0].components) @ represent(rep3, fs[1].components), atol=1e-12
    )


def test_density_matrix_validation():
    with pytest.raises(ValidationError, match="trace"):
        DensityMatrix(np.eye(2, dtype=complex))
    with pytest.raises(ValidationError, match="Hermitian"):
        DensityMatrix(np.array([[0.5, 1.0], [0.0, 0.5]]))
