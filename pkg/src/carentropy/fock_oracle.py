"""Independent ground truth on an explicit 2^n-dimensional Fock space.

Jordan-Wigner mode operators realize an irreducible representation of the
CAR generators: the positive-energy eigenmode ``e_j`` of the one-particle
generator maps to the creation operator ``a_j^dagger`` and its conjugate
``Gamma e_j`` to ``a_j``, extended complex-linearly.  This direction of the
mapping is forced by the vacuum two-point function, which must reproduce the
ground polarization ``<Gamma f, P g>``.

Everything downstream is dense linear algebra: Gibbs densities, Umegaki
relative entropy with matrix logarithms, the commutator form of the entropy,
and operator-level thermal/ground-state checks (trace KMS identity, spectral
positivity of vacuum correlations).  Matrix functions go through Hermitian
eigendecompositions only; every operator involved is normal.

Memory scales as O(4^n); the default mode cap keeps the oracle at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import SizeLimitError, ValidationError, ZeroModeError
from .one_particle import DEFAULT_TOL, ExcitationVector, SelfDualHamiltonian, _as_vector

#: Default cap on the number of modes (Fock dimension 2**modes).
DEFAULT_MAX_MODES = 10

_SIGMA_Z = np.diag([1.0, -1.0]).astype(complex)
_LOWER = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |0><1|


@dataclass(frozen=True)
class FockRep:
    """Jordan-Wigner representation data for ``n`` fermionic modes.

    Attributes
    ----------
    generator : SelfDualHamiltonian
        The one-particle generator the representation was built from.
    mode_energies : np.ndarray
        Positive eigenvalues, ascending.
    mode_vectors : np.ndarray
        Columns ``e_j``, the phase-fixed positive-energy eigenvectors.
    conj_mode_vectors : np.ndarray
        Columns ``Gamma e_j``.
    annihilators : tuple[np.ndarray, ...]
        Mode annihilation operators on the 2^n-dimensional space.
    hamiltonian : np.ndarray
        Normal-ordered ``H = sum_j eps_j a_j^dagger a_j``; annihilates the
        vacuum, so the induced unitaries fix the ground vector.
    """

    generator: SelfDualHamiltonian
    mode_energies: np.ndarray = field(repr=False)
    mode_vectors: np.ndarray = field(repr=False)
    conj_mode_vectors: np.ndarray = field(repr=False)
    annihilators: tuple = field(repr=False)
    hamiltonian: np.ndarray = field(repr=False)

    @property
    def n_modes(self) -> int:
        return len(self.mode_energies)

    @property
    def dim(self) -> int:
        return 2 ** self.n_modes

    @property
    def vacuum(self) -> np.ndarray:
        vac = np.zeros(self.dim, dtype=complex)
        vac[0] = 1.0
        return vac


@dataclass(frozen=True)
class DensityMatrix:
    """A positive, unit-trace matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValidationError(f"density matrix must be square, got {rho.shape}")
        scale = float(np.linalg.norm(rho))
        if float(np.linalg.norm(rho - rho.conj().T)) > 1e-12 * max(1.0, scale):
            raise ValidationError("density matrix is not Hermitian")
        rho = (rho + rho.conj().T) / 2
        eigs = np.linalg.eigvalsh(rho)
        if eigs.min(initial=0.0) < -1e-12:
            raise ValidationError(f"density matrix has a negative eigenvalue {eigs.min():.3e}")
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > 1e-12:
            raise ValidationError(f"density matrix trace must be 1, got {tr!r}")
        object.__setattr__(self, "matrix", rho)


def _jordan_wigner_annihilators(n: int) -> tuple:
    """Mode operators as sign-string tensor products; CAR holds exactly."""
    ops = []
    for j in range(n):
        op = np.eye(1, dtype=complex)
        for k in range(n):
            if k < j:
                op = np.kron(op, _SIGMA_Z)
            elif k == j:
                op = np.kron(op, _LOWER)
            else:
                op = np.kron(op, np.eye(2, dtype=complex))
        ops.append(op)
    return tuple(ops)


def build_fock_rep(h: SelfDualHamiltonian, max_modes: int = DEFAULT_MAX_MODES) -> FockRep:
    """Build the representation for the positive-energy modes of ``h``.

    Requires absence of zero modes (the vacuum sector is otherwise ambiguous)
    and at most ``max_modes`` modes.
    """
    if h.has_zero_mode():
        raise ZeroModeError("the Fock oracle requires absence of zero modes for the generator")
    energies, vectors = h.positive_modes()
    n = h.space.n_modes
    if len(energies) != n:
        raise ValidationError(
            f"expected {n} positive modes, found {len(energies)}; spectrum is inconsistent"
        )
    if n > max_modes:
        raise SizeLimitError(f"{n} modes exceed the oracle cap of {max_modes} (dim 2**n)")

    annihilators = _jordan_wigner_annihilators(n)
    dim = 2 ** n
    H = np.zeros((dim, dim), dtype=complex)
    for eps, a in zip(energies, annihilators):
        H += eps * (a.conj().T @ a)
    conj_vectors = np.column_stack([h.space.conjugate(vectors[:, j]) for j in range(n)])
    return FockRep(
        generator=h,
        mode_energies=energies,
        mode_vectors=vectors,
        conj_mode_vectors=conj_vectors,
        annihilators=annihilators,
        hamiltonian=H,
    )


def represent(rep: FockRep, f) -> np.ndarray:
    """Represent the CAR generator of ``f`` as a Fock-space matrix.

    Complex-linear in ``f``; for admissible ``f`` the result is Hermitian,
    unitary and squares to the identity.
    """
    fv = _as_vector(f, rep.generator.space.dim)
    create_coeff = rep.mode_vectors.conj().T @ fv        # <e_j, f>
    annihilate_coeff = rep.conj_mode_vectors.conj().T @ fv  # <Gamma e_j, f>
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for c, d, a in zip(create_coeff, annihilate_coeff, rep.annihilators):
        out += c * a.conj().T + d * a
    return out


def represent_product(rep: FockRep, fs) -> np.ndarray:
    """Represent an ordered product of CAR generators."""
    out = np.eye(rep.dim, dtype=complex)
    for f in fs:
        out = out @ represent(rep, f)
    return out


def gibbs_density(rep: FockRep, beta: float) -> DensityMatrix:
    """Gibbs density ``exp(-beta H) / Tr(exp(-beta H))``.

    The induced state's two-point function reproduces the thermal
    polarization ``<Gamma f, Q_beta g>``.
    """
    if not np.isfinite(beta) or beta <= 0:
        raise ValidationError(f"inverse temperature must be positive and finite, got {beta}")
    energies, basis = np.linalg.eigh(rep.hamiltonian)
    weights = np.exp(-beta * (energies - energies.min()))
    weights /= weights.sum()
    rho = (basis * weights) @ basis.conj().T
    return DensityMatrix(matrix=rho)


def _admissible_vector(rep: FockRep, f) -> np.ndarray:
    if isinstance(f, ExcitationVector):
        return f.components
    return ExcitationVector(
        space=rep.generator.space, components=_as_vector(f, rep.generator.space.dim)
    ).components


def excited_density(rep: FockRep, rho: DensityMatrix, fs) -> DensityMatrix:
    """Conjugate a density by the unitary product of admissible excitations."""
    F = represent_product(rep, [_admissible_vector(rep, f) for f in fs])
    return DensityMatrix(matrix=F @ rho.matrix @ F.conj().T)


def _density(arg) -> np.ndarray:
    return arg.matrix if isinstance(arg, DensityMatrix) else np.asarray(arg, dtype=complex)


def umegaki(sigma, tau) -> float:
    """Umegaki relative entropy ``Tr(sigma (log sigma - log tau))``.

    ``tau`` must be strictly positive; null eigenvalues of ``sigma`` enter
    with the ``0 log 0 = 0`` convention.  Note the argument-order convention
    used throughout this package: the entropy of an excited state relative to
    the reference is ``umegaki(rho_ref, rho_excited)``.
    """
    s_mat = _density(sigma)
    t_mat = _density(tau)
    if s_mat.shape != t_mat.shape:
        raise ValidationError(f"shape mismatch: {s_mat.shape} vs {t_mat.shape}")
    t_eigs, t_basis = np.linalg.eigh(t_mat)
    if t_eigs.min(initial=1.0) <= 1e-14:
        raise ValidationError(
            f"second argument is singular (min eigenvalue {t_eigs.min():.3e}); "
            "the support condition fails"
        )
    log_tau = (t_basis * np.log(t_eigs)) @ t_basis.conj().T
    s_eigs, s_basis = np.linalg.eigh(s_mat)
    s_eigs = np.clip(s_eigs, 0.0, None)
    entropy_term = float(sum(x * np.log(x) for x in s_eigs if x > 0.0))
    cross = complex(np.trace(s_mat @ log_tau))
    if abs(cross.imag) > 1e-10 * max(1.0, abs(cross)):
        raise ValidationError(f"relative entropy came out non-real (imag {cross.imag:.3e})")
    return entropy_term - cross.real


def commutator_entropy(rep: FockRep, rho: DensityMatrix, fs) -> float:
    """Entropy in commutator form: ``Tr(rho F [H, F^dagger])``.

    Equals ``umegaki(rho, F rho F^dagger)`` when ``rho`` is the Gibbs density
    at unit inverse temperature, where ``H`` is the modular generator; at
    other temperatures the modular generator is ``beta H`` and the two differ
    by that factor.
    """
    F = represent_product(rep, [_admissible_vector(rep, f) for f in fs])
    H = rep.hamiltonian
    value = complex(np.trace(rho.matrix @ F @ (H @ F.conj().T - F.conj().T @ H)))
    if abs(value.imag) > 1e-10 * max(1.0, abs(value)):
        raise ValidationError(f"commutator entropy came out non-real (imag {value.imag:.3e})")
    return value.real


def _evolution_factors(rep: FockRep, z: complex) -> tuple[np.ndarray, np.ndarray]:
    """Matrices of ``exp(-izH)`` and ``exp(izH)`` by eigendecomposition."""
    energies, basis = np.linalg.eigh(rep.hamiltonian)
    forward = (basis * np.exp(-1j * z * energies)) @ basis.conj().T
    backward = (basis * np.exp(1j * z * energies)) @ basis.conj().T
    return forward, backward


def heisenberg(rep: FockRep, b: np.ndarray, z: complex) -> np.ndarray:
    """Induced dynamics ``alpha_z(B) = exp(-izH) B exp(izH)``, analytically continued.

    Real ``z`` conjugates by the unitary ``U_t = exp(-itH)`` that implements
    the one-particle flow; complex ``z`` is the finite-dimensional analytic
    continuation entering the KMS identity.
    """
    forward, backward = _evolution_factors(rep, z)
    return forward @ b @ backward


def verify_kms(rep: FockRep, beta: float, a: np.ndarray, b: np.ndarray, t: float,
               rho: DensityMatrix | None = None) -> float:
    """Residual of the trace KMS identity at inverse temperature ``beta``.

    Returns ``|Tr(rho A alpha_t(B)) - Tr(rho alpha_{t+i beta}(B) A)|`` with
    the dynamics of :func:`heisenberg`.  For the Gibbs density at ``beta``
    (the default ``rho``) the residual vanishes to round-off; generic
    non-Gibbs densities give order-one residuals.
    """
    density = (rho if rho is not None else gibbs_density(rep, beta)).matrix
    lhs = np.trace(density @ a @ heisenberg(rep, b, t))
    rhs = np.trace(density @ heisenberg(rep, b, t + 1j * beta) @ a)
    return float(abs(lhs - rhs))


def verify_ground_state(rep: FockRep, a: np.ndarray, b: np.ndarray,
                        hamiltonian: np.ndarray | None = None,
                        atol: float = DEFAULT_TOL) -> bool:
    """Spectral-support check of the vacuum correlation function.

    True iff the vacuum is invariant and every frequency contributing to
    ``t -> (vac, A alpha_t(B) vac)`` is nonnegative -- automatic for the
    normal-ordered ``H >= 0``.  Passing a shifted ``hamiltonian`` probes the
    frequency-sign sensitivity of the check (negative control).
    """
    H = rep.hamiltonian if hamiltonian is None else hamiltonian
    vac = rep.vacuum
    if float(np.linalg.norm(H @ vac)) > atol * max(1.0, float(np.linalg.norm(H))):
        return False
    energies, basis = np.linalg.eigh(H)
    # amplitude of frequency E_k in (vac, A e^{-itH} B vac)
    left = (vac.conj() @ a) @ basis
    right = basis.conj().T @ (b @ vac)
    amplitudes = left * right
    significant = np.abs(amplitudes) > atol * max(1.0, float(np.abs(amplitudes).max(initial=0.0)))
    return bool(np.all(energies[significant] >= -atol * max(1.0, float(np.abs(energies).max(initial=0.0)))))
