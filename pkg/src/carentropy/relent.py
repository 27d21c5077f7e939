"""Relative entropy of excitation states over a quasifree thermal state.

Conventions, fixed once and validated against the Fock-space oracle:

* Argument order.  ``S(excited || reference)`` equals
  ``Tr(rho_ref (log rho_ref - log rho_exc))`` in the density-matrix picture.
  The reference density sits outside the logarithm difference; common modern
  usage swaps the arguments, so compare with care.
* Inverse temperature.  The closed forms are proven for the unit-temperature
  state of the flow ``exp(-i t h)``; general ``beta`` is reached by rescaling
  the generator to ``beta*h``, the same state with the same polarization, so
  the single-excitation entropy is ``<f, Q_beta (beta*h) f>``.
* Sign of the trace formula.  The multi-excitation entropy is
  ``Tr(A^-1 [[0, a], [-a^T, 0]]) / 2``; this is the sign that reduces to the
  single-excitation closed form at m = 1, is additive over two-point
  orthonormal families, and is nonnegative.

All entropies are reported in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrixError, ValidationError
from .one_particle import ExcitationVector, _as_vector
from .pfaffian import CONDITION_LIMIT, pfaffian
from .quasifree import QuasifreeState, two_point_matrix

#: Universal ratio between exponential-unitary and plain excitations.
SIN_SQUARED_ONE = math.sin(1.0) ** 2

#: Two excitation vectors closer than this cancel as an adjacent pair.
DUPLICATE_TOL = 1e-12

METHOD_SINGLE = "closed_form_single"
METHOD_PFAFFIAN = "pfaffian_trace"
METHOD_CONCATENATION = "concatenation"
METHOD_EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class EntropyResult:
    """An entropy value (nats) plus how it was obtained.

    ``condition_number`` and ``pfaffian_residual`` diagnose the trace-formula
    path: the condition of the two-point matrix A and ``|Pf(A) - 1|``, which
    vanishes for admissible excitation families.
    """

    value: float
    method: str
    condition_number: float | None = None
    pfaffian_residual: float | None = None

    def __post_init__(self):
        if self.value < -1e-9:
            raise ValidationError(
                f"relative entropy must be nonnegative up to noise, got {self.value!r}"
            )


def _require_thermal(state: QuasifreeState) -> None:
    if not state.is_thermal:
        raise ValidationError("entropy formulas need a state tagged with a thermal flow (h, beta)")


def _admissible(state: QuasifreeState, f) -> np.ndarray:
    """Return validated components; raw vectors go through the invariant checks."""
    if isinstance(f, ExcitationVector):
        if f.space.dim != state.space.dim:
            raise ValidationError("excitation lives on a different space")
        return f.components
    return ExcitationVector(space=state.space, components=_as_vector(f, state.space.dim)).components


def _entropy_generator(state: QuasifreeState) -> np.ndarray:
    """Matrix of ``Q_beta (beta*h)``, the quadratic form behind every entropy here."""
    return state.polarization.matrix @ (state.beta * state.hamiltonian.matrix)


def _real_part(value: complex, imag_tol: float) -> float:
    if abs(value.imag) > imag_tol * max(1.0, abs(value)):
        raise ValidationError(
            f"entropy came out non-real (imag {value.imag:.3e}); upstream inputs are inconsistent"
        )
    return float(value.real)


def relent_single(state: QuasifreeState, f) -> EntropyResult:
    """Relative entropy of a single-excitation state: ``<f, Q_beta (beta*h) f>``.

    For one spectral mode of energy eps this evaluates to
    ``beta*eps*tanh(beta*eps/2)``.
    """
    _require_thermal(state)
    fv = _admissible(state, f)
    value = complex(np.vdot(fv, _entropy_generator(state) @ fv))
    return EntropyResult(value=_real_part(value, 1e-10), method=METHOD_SINGLE)


def _cancel_adjacent_duplicates(vectors: list[np.ndarray]) -> list[np.ndarray]:
    """Drop adjacent duplicate pairs: B(f)B(f) = 1 for admissible f."""
    stack: list[np.ndarray] = []
    for v in vectors:
        if stack and np.linalg.norm(stack[-1] - v) <= DUPLICATE_TOL * max(1.0, float(np.linalg.norm(v))):
            stack.pop()
        else:
            stack.append(v)
    return stack


def build_entropy_matrices(state: QuasifreeState, fs) -> tuple[np.ndarray, np.ndarray]:
    """The (A, a) pair entering the multi-excitation trace formula.

    ``A`` is the 2m x 2m two-point matrix of the list ``f_1, ..., f_m,
    f_m, ..., f_1`` (the time-frozen layout whose evolved version generates
    the entropy); ``Pf(A) = 1`` for admissible families.  ``a`` is the m x m
    matrix ``a[j, k] = <f_j, Q_beta (beta*h) f_{m+1-k}>`` -- columns run over
    the reversed list, matching the layout of ``A``.
    """
    _require_thermal(state)
    vectors = [_admissible(state, f) for f in fs]
    if not vectors:
        raise ValidationError("need at least one excitation vector")
    A = two_point_matrix(state, vectors + vectors[::-1])
    frame = np.column_stack(vectors)
    a = (frame.conj().T @ _entropy_generator(state) @ frame)[:, ::-1]
    return A, a


def relent_multi(state: QuasifreeState, fs) -> EntropyResult:
    """Relative entropy of a multi-excitation state via the Pfaffian trace formula.

    Computes ``Tr(A^-1 [[0, a], [-a^T, 0]]) / 2`` after cancelling adjacent
    duplicate excitations (which would otherwise make ``A`` singular without
    changing the state).  Reduces to :func:`relent_single` at m = 1 and to a
    sum of single entropies for two-point orthonormal families.
    """
    _require_thermal(state)
    vectors = _cancel_adjacent_duplicates([_admissible(state, f) for f in fs])
    m = len(vectors)
    if m == 0:
        # the excitations cancel pairwise and the state equals the reference
        return EntropyResult(value=0.0, method=METHOD_PFAFFIAN)
    A, a = build_entropy_matrices(state, vectors)
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularMatrixError(
            f"two-point matrix is singular (condition estimate {cond:.3e}); "
            "remove duplicate or linearly dependent excitations",
            condition=cond,
        )
    zero = np.zeros((m, m))
    block = np.block([[zero, a], [-a.T, zero]])
    value = 0.5 * np.trace(np.linalg.solve(A, block))
    return EntropyResult(
        value=_real_part(complex(value), 1e-9),
        method=METHOD_PFAFFIAN,
        condition_number=cond,
        pfaffian_residual=float(abs(pfaffian(A) - 1.0)),
    )


def relent_between(state: QuasifreeState, fs, gs) -> EntropyResult:
    """Relative entropy between two multi-excitation states.

    ``S(w_{f1..fn} || w_{g1..gm}) = S(w_{gm..g1 f1..fn} || w)``: the reference
    excitations are reversed and prepended, then the trace formula applies.
    Identical lists cancel completely and give zero.
    """
    combined = [_admissible(state, g) for g in gs][::-1] + [_admissible(state, f) for f in fs]
    result = relent_multi(state, combined)
    return EntropyResult(
        value=result.value,
        method=METHOD_CONCATENATION,
        condition_number=result.condition_number,
        pfaffian_residual=result.pfaffian_residual,
    )


def relent_exponential(state: QuasifreeState, f) -> EntropyResult:
    """Relative entropy of the exponential-unitary excitation ``exp(i B(f))``.

    Exactly ``sin(1)**2`` times the single-excitation entropy: the exponential
    collapses to ``cos(1) + i sin(1) B(f)`` because ``B(f)**2 = 1``, and the
    constant part drops out of the modular derivative.
    """
    base = relent_single(state, f)
    return EntropyResult(value=SIN_SQUARED_ONE * base.value, method=METHOD_EXPONENTIAL)
