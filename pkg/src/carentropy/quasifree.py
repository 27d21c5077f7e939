"""Quasifree states and their n-point functions.

A quasifree state is the closure of a base polarization: odd n-point
functions vanish, and the 2m-point function is the Pfaffian of the
antisymmetric matrix collecting the two-point values of the arguments.
:func:`n_point` takes the Pfaffian fast path; :func:`n_point_reference`
evaluates the defining signed pairing sum directly (the sum has (2m-1)!!
terms, hence the size cap).

States tagged with a one-particle flow ``(h, beta)`` are thermal: the tag is
re-verified at construction so a mismatched ``(Q, h, beta)`` triple cannot
silently produce wrong entropies.  When ``h`` has zero modes the thermal
polarization is still used; it is the canonical quasifree representative
even where uniqueness arguments need the zero-mode-free assumption.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SizeLimitError, ValidationError
from .one_particle import (
    DEFAULT_TOL,
    BasePolarization,
    OneParticleSpace,
    SelfDualHamiltonian,
    _as_vector,
    ground_polarization,
    q_beta,
    two_point,
)
from .pfaffian import pfaffian, perfect_pairings, permutation_sign

#: Length cap for the permutation-sum reference n-point evaluation.
REFERENCE_MAX_VECTORS = 12


@dataclass(frozen=True)
class QuasifreeState:
    """A quasifree state given by its base polarization.

    ``hamiltonian``/``beta`` optionally tag the state as the thermal
    (``beta`` finite) or ground (``beta`` None) state of a one-particle flow.
    """

    polarization: BasePolarization
    hamiltonian: SelfDualHamiltonian | None = None
    beta: float | None = None

    def __post_init__(self):
        if self.hamiltonian is None:
            if self.beta is not None:
                raise ValidationError("an inverse temperature requires a generator")
            return
        if self.hamiltonian.space.dim != self.polarization.space.dim:
            raise ValidationError("generator and polarization live on different spaces")
        expected = (
            q_beta(self.hamiltonian, self.beta)
            if self.beta is not None
            else ground_polarization(self.hamiltonian)
        )
        resid = float(np.linalg.norm(expected.matrix - self.polarization.matrix))
        if resid > DEFAULT_TOL * max(1.0, float(np.linalg.norm(expected.matrix))):
            raise ValidationError(
                f"polarization does not match the tagged flow: residual {resid:.3e}"
            )

    @property
    def space(self) -> OneParticleSpace:
        return self.polarization.space

    @property
    def is_thermal(self) -> bool:
        """True when tagged as a KMS state at finite inverse temperature."""
        return self.hamiltonian is not None and self.beta is not None

    def two_point(self, f, g) -> complex:
        return two_point(self.polarization, f, g)


def kms_state(h: SelfDualHamiltonian, beta: float) -> QuasifreeState:
    """The quasifree KMS state at inverse temperature ``beta`` for the flow of ``h``."""
    return QuasifreeState(polarization=q_beta(h, beta), hamiltonian=h, beta=float(beta))


def ground_state(h: SelfDualHamiltonian) -> QuasifreeState:
    """The quasifree ground state (positive-axis spectral projector) for ``h``."""
    return QuasifreeState(polarization=ground_polarization(h), hamiltonian=h, beta=None)


def explicit_state(Q: BasePolarization) -> QuasifreeState:
    """A quasifree state from a bare polarization, with no flow tag."""
    return QuasifreeState(polarization=Q)


def two_point_matrix(state: QuasifreeState, fs) -> np.ndarray:
    """Antisymmetric matrix of two-point values over a list of vectors.

    Entry (j, k) for j < k is ``W2(f_j, f_k)``; the lower triangle is the
    negated transpose.  The Pfaffian of this matrix is the n-point function.
    """
    dim = state.space.dim
    vectors = [_as_vector(f, dim) for f in fs]
    n = len(vectors)
    A = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(j + 1, n):
            w = state.two_point(vectors[j], vectors[k])
            A[j, k] = w
            A[k, j] = -w
    return A


def n_point(state: QuasifreeState, fs) -> complex:
    """n-point function of a quasifree state.

    Odd lengths return exact zero (a structural fact, nothing is evaluated);
    even lengths are the Pfaffian of :func:`two_point_matrix`.
    """
    vectors = [_as_vector(f, state.space.dim) for f in fs]
    if len(vectors) % 2:
        return 0j
    if not vectors:
        return 1 + 0j
    return pfaffian(two_point_matrix(state, vectors))


def n_point_reference(state: QuasifreeState, fs) -> complex:
    """n-point function by the defining signed sum over pairings.

    Independent of the Pfaffian code path: each term multiplies two-point
    values directly.  Capped at 12 vectors.
    """
    vectors = [_as_vector(f, state.space.dim) for f in fs]
    n = len(vectors)
    if n > REFERENCE_MAX_VECTORS:
        raise SizeLimitError(f"reference n-point capped at {REFERENCE_MAX_VECTORS} vectors, got {n}")
    if n % 2:
        return 0j
    if n == 0:
        return 1 + 0j

    m = n // 2
    total = 0j
    for pairs in perfect_pairings(tuple(range(n))):
        perm = [i for i, _ in pairs] + [j for _, j in pairs]
        term = 1 + 0j
        for i, j in pairs:
            term *= state.two_point(vectors[i], vectors[j])
        total += permutation_sign(perm) * term
    return complex((-1) ** (m * (m - 1) // 2) * total)
