"""Pfaffians of complex antisymmetric matrices.

Three entry points:

* :func:`pfaffian` -- Parlett-Reid tridiagonalization with partial pivoting,
  O(m^3), the production path.
* :func:`pfaffian_reference` -- the signed sum over perfect pairings,
  exponential cost, kept as an independent cross-check.
* :func:`pfaffian_derivative` -- the trace identity
  ``d/dt Pf(A(t)) = Pf(A) * Tr(A^-1 dA/dt) / 2``.

Inputs are symmetrized ``(A - A.T)/2`` on ingestion after an antisymmetry
check, since matrices assembled from two-point functions carry
round-off-scale asymmetry.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularMatrixError, SizeLimitError, ValidationError

#: Relative tolerance for the antisymmetry check at ingestion.
ANTISYMMETRY_TOL = 1e-10

#: Order cap (2m with m <= 6) for the combinatorial reference evaluation.
REFERENCE_MAX_PAIRS = 6

#: Condition-number guard applied before inverting in the derivative identity.
CONDITION_LIMIT = 1e12


def as_antisymmetric(a, tol: float = ANTISYMMETRY_TOL) -> np.ndarray:
    """Validate and strictly antisymmetrize a square matrix of even order."""
    A = np.asarray(a, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] % 2:
        raise ValidationError(f"antisymmetric order must be even, got {A.shape[0]}")
    asym = float(np.linalg.norm(A + A.T)) / max(1.0, float(np.linalg.norm(A)))
    if asym > tol:
        raise ValidationError(f"matrix is not antisymmetric: relative violation {asym:.3e}")
    return (A - A.T) / 2


def pfaffian(a, tol: float = ANTISYMMETRY_TOL) -> complex:
    """Pfaffian by Parlett-Reid tridiagonalization with partial pivoting.

    Gauss transforms are congruences with unit determinant, so they leave the
    Pfaffian unchanged; row/column swaps each flip its sign.  The result
    satisfies ``Pf(A)**2 = det(A)`` up to round-off.
    """
    A = as_antisymmetric(a, tol)
    n = A.shape[0]
    if n == 0:
        return 1 + 0j

    value = 1 + 0j
    for k in range(0, n - 1, 2):
        # pivot the largest remaining entry of column k into row k+1
        pivot = k + 1 + int(np.argmax(np.abs(A[k + 1:, k])))
        if pivot != k + 1:
            A[[k + 1, pivot], k:] = A[[pivot, k + 1], k:]
            A[k:, [k + 1, pivot]] = A[k:, [pivot, k + 1]]
            value = -value
        if A[k + 1, k] == 0.0:
            return 0j
        value *= A[k, k + 1]
        if k + 2 < n:
            tau = A[k, k + 2:] / A[k, k + 1]
            A[k + 2:, k + 2:] += np.outer(tau, A[k + 2:, k + 1])
            A[k + 2:, k + 2:] -= np.outer(A[k + 2:, k + 1], tau)
    return complex(value)


def perfect_pairings(indices: tuple[int, ...]):
    """Yield all partitions of ``indices`` into ordered pairs.

    Each pairing comes as a list of ``(i, j)`` with ``i < j`` and the first
    members strictly increasing across pairs.
    """
    if not indices:
        yield []
        return
    first, rest = indices[0], indices[1:]
    for pos, partner in enumerate(rest):
        for tail in perfect_pairings(rest[:pos] + rest[pos + 1:]):
            yield [(first, partner)] + tail


def permutation_sign(perm) -> int:
    """Sign of a permutation given as a sequence, by inversion count."""
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def pfaffian_reference(a, tol: float = ANTISYMMETRY_TOL) -> complex:
    """Pfaffian by the signed sum over restricted permutations.

    Evaluates ``(-1)**(m(m-1)/2) * sum_p sgn(p) * prod_j A[p(j), p(j+m)]``
    over permutations of ``{1, ..., 2m}`` with ``p(1) < ... < p(m)`` and
    ``p(j) < p(j+m)``, i.e. over perfect pairings listed in block form.
    Capped at m <= 6 because the sum has (2m-1)!! terms.
    """
    A = as_antisymmetric(a, tol)
    n = A.shape[0]
    m = n // 2
    if m > REFERENCE_MAX_PAIRS:
        raise SizeLimitError(
            f"reference Pfaffian capped at order {2 * REFERENCE_MAX_PAIRS}, got {n}"
        )
    if n == 0:
        return 1 + 0j

    total = 0j
    for pairs in perfect_pairings(tuple(range(n))):
        perm = [i for i, _ in pairs] + [j for _, j in pairs]
        term = 1 + 0j
        for i, j in pairs:
            term *= A[i, j]
        total += permutation_sign(perm) * term
    return complex((-1) ** (m * (m - 1) // 2) * total)


def pfaffian_derivative(a, adot, tol: float = ANTISYMMETRY_TOL) -> complex:
    """Directional derivative of the Pfaffian along ``adot``.

    Returns ``Pf(A) * Tr(A^-1 adot) / 2``; requires ``A`` invertible with
    condition number below :data:`CONDITION_LIMIT`.
    """
    A = as_antisymmetric(a, tol)
    Adot = as_antisymmetric(adot, tol)
    if A.shape != Adot.shape:
        raise ValidationError(f"order mismatch: {A.shape} vs {Adot.shape}")
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularMatrixError(
            f"matrix is singular or ill-conditioned (condition estimate {cond:.3e})",
            condition=cond,
        )
    return complex(0.5 * pfaffian(A, tol) * np.trace(np.linalg.solve(A, Adot)))
