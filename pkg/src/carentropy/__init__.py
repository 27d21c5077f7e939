"""Relative entropy of fermionic excitation states over quasifree KMS states.

The package builds finite self-dual CAR data (a one-particle space with an
antiunitary involution, a compatible Hermitian generator, thermal and ground
polarizations), evaluates n-point functions of quasifree states through
Pfaffians, and computes relative entropies of single- and multi-excitation
states in closed form.  Every formula is cross-checkable against an
independent Fock-space oracle (Jordan-Wigner representation, Gibbs densities,
Umegaki relative entropy).
"""

from .errors import (
    CarEntropyError,
    ScenarioError,
    SingularMatrixError,
    SizeLimitError,
    ValidationError,
    ZeroModeError,
)
from .fock_oracle import (
    DensityMatrix,
    FockRep,
    build_fock_rep,
    commutator_entropy,
    excited_density,
    gibbs_density,
    heisenberg,
    represent,
    represent_product,
    umegaki,
    verify_ground_state,
    verify_kms,
)
from .one_particle import (
    BasePolarization,
    ExcitationVector,
    OneParticleSpace,
    SelfDualHamiltonian,
    build_canonical_space,
    embed_hamiltonian,
    ground_polarization,
    q_beta,
    spectral_excitation,
    symmetrize_normalize,
    two_point,
    validate_hamiltonian,
)
from .pfaffian import as_antisymmetric, pfaffian, pfaffian_derivative, pfaffian_reference
from .quasifree import (
    QuasifreeState,
    explicit_state,
    ground_state,
    kms_state,
    n_point,
    n_point_reference,
    two_point_matrix,
)
from .relent import (
    SIN_SQUARED_ONE,
    EntropyResult,
    build_entropy_matrices,
    relent_between,
    relent_exponential,
    relent_multi,
    relent_single,
)

__version__ = "0.1.0"

__all__ = [
    "BasePolarization",
    "CarEntropyError",
    "DensityMatrix",
    "EntropyResult",
    "ExcitationVector",
    "FockRep",
    "OneParticleSpace",
    "QuasifreeState",
    "ScenarioError",
    "SelfDualHamiltonian",
    "SIN_SQUARED_ONE",
    "SingularMatrixError",
    "SizeLimitError",
    "ValidationError",
    "ZeroModeError",
    "as_antisymmetric",
    "build_canonical_space",
    "build_entropy_matrices",
    "build_fock_rep",
    "commutator_entropy",
    "embed_hamiltonian",
    "excited_density",
    "explicit_state",
    "gibbs_density",
    "ground_polarization",
    "ground_state",
    "heisenberg",
    "kms_state",
    "n_point",
    "n_point_reference",
    "pfaffian",
    "pfaffian_derivative",
    "pfaffian_reference",
    "q_beta",
    "relent_between",
    "relent_exponential",
    "relent_multi",
    "relent_single",
    "represent",
    "represent_product",
    "spectral_excitation",
    "symmetrize_normalize",
    "two_point",
    "two_point_matrix",
    "umegaki",
    "validate_hamiltonian",
    "verify_ground_state",
    "verify_kms",
]
