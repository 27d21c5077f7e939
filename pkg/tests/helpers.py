"""Shared construction helpers for the test suite."""

import numpy as np

from carentropy import (
    ExcitationVector,
    SelfDualHamiltonian,
    build_canonical_space,
    embed_hamiltonian,
    symmetrize_normalize,
)


def random_hermitian(n: int, rng) -> np.ndarray:
    block = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (block + block.conj().T) / 2


def random_model(n: int, seed: int) -> SelfDualHamiltonian:
    rng = np.random.default_rng(seed)
    return embed_hamiltonian(build_canonical_space(n), random_hermitian(n, rng))


def random_excitation(h: SelfDualHamiltonian, rng, label: str = "") -> ExcitationVector:
    v = rng.standard_normal(h.space.dim) + 1j * rng.standard_normal(h.space.dim)
    return symmetrize_normalize(h.space, v, label=label)


def random_antisymmetric(order: int, rng) -> np.ndarray:
    block = rng.standard_normal((order, order)) + 1j * rng.standard_normal((order, order))
    return block - block.T
