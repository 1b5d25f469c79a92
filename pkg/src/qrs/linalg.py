"""Dense complex linear algebra used by the generators and metrics.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. The heavy lifting
(Hermitian eigensolver, Householder QR) is delegated to LAPACK through
``numpy.linalg``; this module adds the input validation and the tolerance
policy the rest of the package relies on.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian, NotPsd, NotSquare, RankDeficient

__all__ = [
    "HermitianEigen",
    "as_matrix",
    "conj_transpose",
    "trace",
    "hermitian_eig",
    "qr_unitary",
    "sqrt_psd",
    "kron",
    "partial_trace",
    "hermitian_part",
]

HERMITIAN_TOL = 1e-8
PSD_CLAMP = 1e-10
RANK_TOL = 1e-12


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_matrix(a) -> np.ndarray:
    """Coerce ``a`` (array or state object) to a 2-d complex array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def _square(a):
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"matrix of shape {m.shape} is not square")
    return m


def conj_transpose(a) -> np.ndarray:
    return np.ascontiguousarray(as_matrix(a).conj().T)


def hermitian_part(a) -> np.ndarray:
    m = _square(a)
    return 0.5 * (m + m.conj().T)


def trace(a) -> complex:
    return complex(np.trace(_square(a)))


def hermitian_eig(a) -> HermitianEigen:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    m = _square(a)
    if m.size and np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise NotHermitian("matrix is not Hermitian within 1e-8")
    try:
        w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    return HermitianEigen(w, v)


def qr_unitary(a):
    """Householder QR of a square, full-rank matrix.

    Returns:
        ``(Q, R)`` with ``Q`` unitary and ``R`` upper triangular.

    Raises:
        RankDeficient: some ``|R_ii|`` is at most ``1e-12 * ||A||_F``.
    """
    m = _square(a)
    q, r = np.linalg.qr(m)
    if np.min(np.abs(np.diag(r))) <= RANK_TOL * np.linalg.norm(m):
        raise RankDeficient("matrix is numerically rank deficient")
    return q, r


def sqrt_psd(a) -> np.ndarray:
    """Principal square root of a Hermitian positive semi-definite matrix.

    Eigenvalues in ``[-1e-10, 0)`` are treated as rounding noise and clamped
    to zero; anything more negative raises :class:`NotPsd`.
    """
    w, v = hermitian_eig(a)
    if w.size and w[0] < -PSD_CLAMP:
        raise NotPsd(f"matrix has eigenvalue {w[0]:.3e} < -1e-10")
    root = np.sqrt(np.clip(w, 0.0, None))
    s = (v * root) @ v.conj().T
    return 0.5 * (s + s.conj().T)


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def partial_trace(a, dims, which: int) -> np.ndarray:
    """Trace out one factor of a bipartite operator on ``C^n (x) C^k``.

    Args:
        a: square matrix of side ``n * k``.
        dims: ``(n, k)``.
        which: ``2`` traces out the second factor (result ``n x n``), ``1``
            the first (result ``k x k``).
    """
    m = _square(a)
    n, k = (int(d) for d in dims)
    if n < 1 or k < 1 or m.shape[0] != n * k:
        raise DimensionMismatch(f"side {m.shape[0]} does not match dims ({n}, {k})")
    t = m.reshape(n, k, n, k)
    if which == 2:
        return np.einsum("ijkj->ik", t)
    if which == 1:
        return np.einsum("ijil->jl", t)
    raise DimensionMismatch(f"subsystem index must be 1 or 2, got {which}")
