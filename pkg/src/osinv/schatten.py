"""Singular values, Schatten norms, and the summing norm of a matrix.

Matrices are plain 2-D complex arrays (anything ``np.asarray`` accepts,
stored row-major).  The module computes

* singular values (dense SVD; intended for desk-scale matrices up to a
  few hundred rows — no sparse or iterative machinery),
* Schatten p-norms ``(sum s_k(x)^p)**(1/p)``,
* Schatten-Orlicz norms ``||x||_phi`` — the Luxemburg norm of the
  singular-value sequence, and
* :func:`pi1_of_map`, the completely-1-summing norm of a concrete matrix
  viewed as a map between two homogeneous spaces.  The summing ideal
  coincides with a Schatten-Orlicz class whose Orlicz function is pinned
  (up to universal constants) by the fundamental sequence
  ``n -> pi1_fundamental(domain, codomain, n)``; the function is
  reconstructed once per descriptor pair on a geometric dimension grid
  and cached, so repeated evaluations cost one SVD plus one
  sequence-norm bisection.
"""

from __future__ import annotations

import functools
import math

import numpy as np

from .errors import BadParameter, DomainError
from .invariants import pi1_fundamental
from .orlicz import OrliczFn, from_fundamental_sequence, sequence_norm
from .spaces import SpaceDescriptor

__all__ = [
    "pi1_of_map",
    "schatten_orlicz_norm",
    "schatten_p_norm",
    "singular_values",
]

# Dimension grid used to sample the summing fundamental sequence when
# reconstructing the Orlicz function of a descriptor pair.
_PHI_GRID: tuple[int, ...] = tuple(2**k for k in range(21))


def _as_matrix(x: object) -> np.ndarray:
    """Validate and return `x` as a nonempty 2-D complex array."""
    arr = np.asarray(x)
    if arr.ndim != 2 or arr.size == 0:
        raise BadParameter(
            f"need a nonempty 2-D matrix, got shape {arr.shape}"
        )
    arr = arr.astype(complex)
    if not np.all(np.isfinite(arr.real) & np.isfinite(arr.imag)):
        raise DomainError("matrix entries must be finite")
    return arr


def singular_values(x: object) -> np.ndarray:
    """Singular values of `x` in nonincreasing order, with multiplicity.

    These are the eigenvalues of ``sqrt(x* x)``; the returned array has
    ``min(rows, cols)`` nonnegative entries.

    Raises
    ------
    BadParameter
        `x` is not a nonempty 2-D matrix.
    DomainError
        `x` has nonfinite entries.
    """
    return np.linalg.svd(_as_matrix(x), compute_uv=False)


def schatten_p_norm(x: object, p: float) -> float:
    """Schatten p-norm: the ``l_p`` norm of the singular values.

    ``p = math.inf`` gives the operator (sup) norm.  The sum is scaled
    by the top singular value before exponentiation so large entries and
    large `p` cannot overflow.

    Raises
    ------
    BadParameter
        ``p < 1`` or nan.
    """
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise BadParameter(f"need p >= 1, got {p}")
    s = singular_values(x)
    top = float(s[0])
    if top == 0.0:
        return 0.0
    if math.isinf(p):
        return top
    return top * float(np.sum((s / top) ** p)) ** (1.0 / p)


def schatten_orlicz_norm(x: object, phi: OrliczFn) -> float:
    """Luxemburg norm of the singular-value sequence of `x`.

    ``phi(t) = t**2`` recovers the Hilbert-Schmidt norm; the value is
    unitarily invariant because the singular values are.
    """
    return sequence_norm(phi, singular_values(x))


@functools.lru_cache(maxsize=None)
def _summing_orlicz_fn(
    domain: SpaceDescriptor, codomain: SpaceDescriptor
) -> OrliczFn:
    """Orlicz function whose fundamental sequence matches the pair's
    summing sequence on the geometric grid (cached by descriptor value;
    entries are deterministic, so concurrent recomputation is benign).
    """
    return from_fundamental_sequence(
        {
            float(n): pi1_fundamental(domain, codomain, n).pi1
            for n in _PHI_GRID
        }
    )


def pi1_of_map(
    domain: SpaceDescriptor, codomain: SpaceDescriptor, x: object
) -> float:
    """Completely-1-summing norm of the matrix `x` as a map.

    Equals :func:`schatten_orlicz_norm` of `x` for the Orlicz function
    reconstructed from ``pi1_fundamental(domain, codomain, .)``, so it
    reproduces the fundamental sequence exactly at grid dimensions
    ``1, 2, 4, ..., 2**20`` and is correct up to universal constants in
    between and off the diagonal.  Padding `x` with zero rows or columns
    does not change the value.

    Raises
    ------
    NotRegular
        Either descriptor lies outside the regular range.
    """
    return schatten_orlicz_norm(x, _summing_orlicz_fn(domain, codomain))
