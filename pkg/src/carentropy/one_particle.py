"""One-particle data: conjugation, self-dual generators, polarizations, excitations.

The one-particle space is a finite-dimensional complex inner-product space of
even dimension 2n carrying an antiunitary involution.  The involution is stored
as ``Gamma v = C @ conj(v)`` with a unitary matrix ``C`` satisfying
``C @ conj(C) = 1``; this turns every antilinear identity into plain matrix
algebra.  On top of it live

* Hermitian generators ``h`` anticommuting with Gamma (so ``spec(h)`` is
  symmetric under negation),
* base polarizations ``Q`` with ``0 <= Q <= 1`` and ``Q + Gamma Q Gamma = 1``
  (thermal ``(1 + exp(-beta*h))**-1`` and ground ``E((0, inf))`` flavours),
* excitation vectors ``f`` with ``Gamma f = f`` and ``<f, f> = 2``.

All inner products follow the physics convention: antilinear in the first
argument (``np.vdot``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .errors import ValidationError, ZeroModeError

#: Relative Frobenius-norm tolerance for structural validation.  Well above
#: double-precision eigensolver noise at the dimensions this package targets.
DEFAULT_TOL = 1e-10


def _as_vector(v, dim: int) -> np.ndarray:
    """Coerce to a complex vector of length ``dim``."""
    arr = np.asarray(getattr(v, "components", v), dtype=complex)
    if arr.shape != (dim,):
        raise ValidationError(f"expected a vector of length {dim}, got shape {arr.shape}")
    return arr


def _rel_err(delta: np.ndarray, scale: float) -> float:
    return float(np.linalg.norm(delta) / max(1.0, scale))


@dataclass(frozen=True)
class OneParticleSpace:
    """A 2n-dimensional complex space with an antiunitary involution.

    Attributes
    ----------
    dim : int
        Dimension 2n of the space.
    conj_matrix : np.ndarray
        Unitary matrix ``C`` representing the involution via
        ``Gamma v = C @ conj(v)``.
    """

    dim: int
    conj_matrix: np.ndarray

    def __post_init__(self):
        if self.dim <= 0 or self.dim % 2:
            raise ValidationError(f"dimension must be even and positive, got {self.dim}")
        C = np.asarray(self.conj_matrix, dtype=complex)
        if C.shape != (self.dim, self.dim):
            raise ValidationError(f"conjugation matrix must be {self.dim}x{self.dim}")
        eye = np.eye(self.dim)
        if _rel_err(C @ C.conj().T - eye, 1.0) > DEFAULT_TOL:
            raise ValidationError("conjugation matrix is not unitary")
        if _rel_err(C @ C.conj() - eye, 1.0) > DEFAULT_TOL:
            raise ValidationError("conjugation does not square to the identity")
        object.__setattr__(self, "conj_matrix", C)

    @property
    def n_modes(self) -> int:
        """n, the number of independent fermionic modes."""
        return self.dim // 2

    def conjugate(self, v) -> np.ndarray:
        """Apply Gamma to a vector."""
        return self.conj_matrix @ np.conj(_as_vector(v, self.dim))

    def conjugate_operator(self, a: np.ndarray) -> np.ndarray:
        """Return ``Gamma A Gamma`` for a linear operator ``A``."""
        return self.conj_matrix @ np.conj(a) @ np.conj(self.conj_matrix)


def build_canonical_space(n: int) -> OneParticleSpace:
    """Canonical 2n-dimensional space with the block-swap conjugation.

    Realizes K = H (+) conj(H): ``Gamma (x (+) y) = (conj(y) (+) conj(x))``,
    i.e. ``C`` is the block anti-diagonal swap.

    Parameters
    ----------
    n : int
        Number of modes; the space has dimension 2n.
    """
    if n < 1:
        raise ValidationError(f"number of modes must be positive, got {n}")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    C = np.block([[zero, eye], [eye, zero]])
    return OneParticleSpace(dim=2 * n, conj_matrix=C)


@dataclass(frozen=True)
class SelfDualHamiltonian:
    """Hermitian generator ``h`` with ``Gamma h Gamma = -h``.

    Generates the one-particle flow ``u_t = exp(-i t h)``.  The
    eigendecomposition is computed once at construction; eigenvector phases
    are fixed deterministically (largest-magnitude component made real and
    positive) so downstream fixtures are reproducible.

    Attributes
    ----------
    space : OneParticleSpace
    matrix : np.ndarray
        The (symmetrized) 2n x 2n Hermitian matrix.
    eigenvalues : np.ndarray
        Ascending; symmetric under negation within tolerance.
    eigenvectors : np.ndarray
        Orthonormal columns matching ``eigenvalues``.
    """

    space: OneParticleSpace
    matrix: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)
    eigenvectors: np.ndarray = field(repr=False)

    @property
    def energy_scale(self) -> float:
        return float(np.max(np.abs(self.eigenvalues), initial=0.0))

    def _zero_tol(self, tol: float = DEFAULT_TOL) -> float:
        return tol * max(1.0, self.energy_scale)

    def has_zero_mode(self, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.any(np.abs(self.eigenvalues) <= self._zero_tol(tol)))

    def positive_modes(self, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
        """Positive eigenvalues (ascending) and their eigenvectors as columns."""
        keep = self.eigenvalues > self._zero_tol(tol)
        return self.eigenvalues[keep], self.eigenvectors[:, keep]

    def flow(self, t: float) -> np.ndarray:
        """Matrix of ``u_t = exp(-i t h)``."""
        phases = np.exp(-1j * t * self.eigenvalues)
        return (self.eigenvectors * phases) @ self.eigenvectors.conj().T

    def evolve(self, v, t: float) -> np.ndarray:
        """Apply ``u_t`` to a vector."""
        vec = _as_vector(v, self.space.dim)
        coeff = self.eigenvectors.conj().T @ vec
        return self.eigenvectors @ (np.exp(-1j * t * self.eigenvalues) * coeff)


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    out = vectors.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        idx = int(np.argmax(np.abs(col)))
        pivot = col[idx]
        if abs(pivot) > 0:
            out[:, k] = col * (np.conj(pivot) / abs(pivot))
    return out


def validate_hamiltonian(space: OneParticleSpace, h, tol: float = DEFAULT_TOL) -> SelfDualHamiltonian:
    """Check the self-dual constraints on ``h`` and cache its spectral data.

    Accepts iff ``h = h^dagger`` and ``Gamma h Gamma = -h`` within the relative
    Frobenius tolerance ``tol``; each failure reports the violating norm.
    """
    mat = np.asarray(h, dtype=complex)
    if mat.shape != (space.dim, space.dim):
        raise ValidationError(f"generator must be {space.dim}x{space.dim}, got {mat.shape}")
    scale = float(np.linalg.norm(mat))
    herm = _rel_err(mat - mat.conj().T, scale)
    if herm > tol:
        raise ValidationError(f"generator is not Hermitian: relative asymmetry {herm:.3e}")
    anti = _rel_err(space.conjugate_operator(mat) + mat, scale)
    if anti > tol:
        raise ValidationError(
            f"generator does not anticommute with the conjugation: relative violation {anti:.3e}"
        )
    mat = (mat + mat.conj().T) / 2
    eigenvalues, eigenvectors = np.linalg.eigh(mat)
    return SelfDualHamiltonian(
        space=space,
        matrix=mat,
        eigenvalues=eigenvalues,
        eigenvectors=_fix_phases(eigenvectors),
    )


def embed_hamiltonian(space: OneParticleSpace, h0, tol: float = DEFAULT_TOL) -> SelfDualHamiltonian:
    """Double an n x n Hermitian matrix into a self-dual generator.

    Builds ``h = h0 (+) (-conj(h0))`` on the canonical space, which satisfies
    ``Gamma h Gamma = -h`` by construction (particle/hole picture).
    """
    n = space.n_modes
    mat0 = np.asarray(h0, dtype=complex)
    if mat0.shape != (n, n):
        raise ValidationError(f"expected an {n}x{n} block for this space, got {mat0.shape}")
    asym = float(np.max(np.abs(mat0 - mat0.conj().T), initial=0.0))
    if asym > tol * max(1.0, float(np.linalg.norm(mat0))):
        raise ValidationError(f"block is not Hermitian: max asymmetry {asym:.3e}")
    zero = np.zeros((n, n))
    h = np.block([[mat0, zero], [zero, -np.conj(mat0)]])
    return validate_hamiltonian(space, h, tol=tol)


@dataclass(frozen=True)
class BasePolarization:
    """Operator ``Q`` encoding a quasifree two-point function.

    Satisfies ``0 <= Q = Q^dagger <= 1`` and ``Q + Gamma Q Gamma = 1``.
    ``provenance`` records how it was built ("explicit", "kms" or "ground");
    thermal polarizations also carry their inverse temperature.
    """

    space: OneParticleSpace
    matrix: np.ndarray
    provenance: str = "explicit"
    beta: float | None = None

    def __post_init__(self):
        Q = np.asarray(self.matrix, dtype=complex)
        if Q.shape != (self.space.dim, self.space.dim):
            raise ValidationError(f"polarization must be {self.space.dim}x{self.space.dim}")
        if _rel_err(Q - Q.conj().T, float(np.linalg.norm(Q))) > DEFAULT_TOL:
            raise ValidationError("polarization is not Hermitian")
        Q = (Q + Q.conj().T) / 2
        eigs = np.linalg.eigvalsh(Q)
        if eigs.min(initial=0.0) < -DEFAULT_TOL or eigs.max(initial=0.0) > 1 + DEFAULT_TOL:
            raise ValidationError(
                f"polarization spectrum not contained in [0, 1]: [{eigs.min():.3e}, {eigs.max():.3e}]"
            )
        resid = _rel_err(Q + self.space.conjugate_operator(Q) - np.eye(self.space.dim), 1.0)
        if resid > DEFAULT_TOL:
            raise ValidationError(f"Q + Gamma Q Gamma != 1: residual {resid:.3e}")
        object.__setattr__(self, "matrix", Q)


def q_beta(h: SelfDualHamiltonian, beta: float, tol: float = DEFAULT_TOL) -> BasePolarization:
    """Thermal polarization ``(1 + exp(-beta*h))**-1`` via the eigenbasis of h.

    Each eigenvalue eps of ``h`` maps to the logistic value
    ``1/(1 + exp(-beta*eps))``, so ``Q`` commutes with ``h`` and inherits the
    polarization identities from the spectral symmetry.
    """
    if not np.isfinite(beta) or beta <= 0:
        raise ValidationError(f"inverse temperature must be positive and finite, got {beta}")
    filling = expit(beta * h.eigenvalues)
    Q = (h.eigenvectors * filling) @ h.eigenvectors.conj().T
    return BasePolarization(space=h.space, matrix=Q, provenance="kms", beta=float(beta))


def ground_polarization(h: SelfDualHamiltonian, tol: float = DEFAULT_TOL) -> BasePolarization:
    """Spectral projector of ``h`` onto the positive axis.

    Requires absence of zero modes for ``h``; with the spectrum symmetric
    under negation this makes ``P`` a base polarization (``P + Gamma P Gamma
    = 1``) and the beta -> infinity limit of the thermal one.
    """
    if h.has_zero_mode(tol):
        raise ZeroModeError(
            "generator has a zero mode; the ground projector requires absence of zero modes for h"
        )
    _, vectors = h.positive_modes(tol)
    P = vectors @ vectors.conj().T
    return BasePolarization(space=h.space, matrix=P, provenance="ground")


@dataclass(frozen=True)
class ExcitationVector:
    """A vector ``f`` with ``Gamma f = f`` and ``<f, f> = 2``.

    These are exactly the vectors whose CAR generator is both unitary and
    Hermitian, hence eligible to excite a reference state.
    """

    space: OneParticleSpace
    components: np.ndarray
    label: str = ""

    def __post_init__(self):
        f = _as_vector(self.components, self.space.dim)
        fixed = _rel_err(self.space.conjugate(f) - f, float(np.linalg.norm(f)))
        if fixed > DEFAULT_TOL:
            raise ValidationError(f"vector is not conjugation-fixed: residual {fixed:.3e}")
        norm_sq = float(np.vdot(f, f).real)
        if abs(norm_sq - 2.0) > DEFAULT_TOL * 2.0:
            raise ValidationError(f"vector must have squared norm 2, got {norm_sq!r}")
        object.__setattr__(self, "components", f)


def spectral_excitation(h: SelfDualHamiltonian, mode: int, label: str | None = None) -> ExcitationVector:
    """Excitation ``f = e + Gamma e`` built from a positive-energy eigenmode.

    ``mode`` indexes the ascending list of positive eigenvalues.  Distinct
    modes yield a family that is orthonormal with respect to any thermal
    two-point function.
    """
    energies, vectors = h.positive_modes()
    if not 0 <= mode < len(energies):
        raise ValidationError(
            f"mode index {mode} out of range: {len(energies)} positive modes available"
        )
    e = vectors[:, mode]
    f = e + h.space.conjugate(e)
    return ExcitationVector(
        space=h.space,
        components=f,
        label=label if label is not None else f"mode{mode}",
    )


def symmetrize_normalize(space: OneParticleSpace, v, label: str = "") -> ExcitationVector:
    """Project an arbitrary vector onto the admissible excitation set.

    Returns ``f = c (v + Gamma v)`` with real ``c > 0`` chosen so that
    ``<f, f> = 2``.  Vectors already admissible are returned unchanged.
    """
    vec = _as_vector(v, space.dim)
    w = vec + space.conjugate(vec)
    norm = float(np.linalg.norm(w))
    if norm <= 1e-12 * max(1.0, float(np.linalg.norm(vec))):
        raise ValidationError("v + Gamma v vanishes; cannot symmetrize an antisymmetric vector")
    return ExcitationVector(space=space, components=w * (np.sqrt(2.0) / norm), label=label)


def two_point(Q: BasePolarization, f, g) -> complex:
    """Two-point function ``W2(f, g) = <Gamma f, Q g>``.

    For thermal ``Q`` this is the KMS two-point function of the quasifree
    state; it is invariant under the one-particle flow and satisfies the
    anticommutator identity ``W2(f, g) + W2(g, f) = <Gamma f, g>``.
    """
    dim = Q.space.dim
    fv = _as_vector(f, dim)
    gv = _as_vector(g, dim)
    return complex(np.vdot(Q.space.conjugate(fv), Q.matrix @ gv))
