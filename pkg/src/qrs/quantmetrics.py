"""Distances and fidelities between states, plus closed-form ensemble formulas.

Two fidelity conventions are exposed: :func:`root_fidelity` is
``tr|sqrt(a) sqrt(b)|`` and :func:`fidelity` is its square, which for a pure
``a = |phi><phi|`` reduces to ``<phi|b|phi>``.
"""
from __future__ import annotations

import math
from itertools import combinations

import numpy as np
from scipy.special import poch

from .errors import DimensionMismatch, InvalidParameter, NotDistribution, NotPsd
from .linalg import as_matrix, sqrt_psd

__all__ = [
    "root_fidelity",
    "fidelity",
    "hs_distance",
    "bures_distance",
    "trace_distance",
    "hellinger_affinity",
    "hs_eigenvalue_density",
    "hs_normalization",
    "log_hs_normalization",
    "mean_fidelity_2K",
    "induced_mean_purity",
]

DIST_TOL = 1e-9
SPECTRUM_TOL = 1e-12
# eigenvalues of sqrt(b) a sqrt(b) below this fraction of its trace are rounding noise
ROUNDOFF = 64 * np.finfo(float).eps


def _pair(a, b):
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ or are not square")
    return a, b


def root_fidelity(a, b) -> float:
    """``tr sqrt(sqrt(b) a sqrt(b))``, clipped below at zero."""
    a, b = _pair(a, b)
    sb = sqrt_psd(b)
    m = sb @ a @ sb
    w = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    scale = max(float(np.sum(np.abs(w))), 1.0)
    if w[0] < -1e-10 * scale:
        raise NotPsd("sqrt(b) a sqrt(b) is not positive semi-definite")
    w = np.where(w > ROUNDOFF * scale, w, 0.0)
    return float(np.sum(np.sqrt(w)))


def fidelity(a, b) -> float:
    """Squared root fidelity; equals ``<phi|b|phi>`` when ``a = |phi><phi|``."""
    return root_fidelity(a, b) ** 2


def hs_distance(a, b) -> float:
    """Hilbert-Schmidt distance ``sqrt(tr (a - b)^2)``."""
    a, b = _pair(a, b)
    return float(np.linalg.norm(a - b))


def bures_distance(a, b) -> float:
    """Bures distance ``sqrt(2 - 2 F_root)``."""
    return math.sqrt(max(0.0, 2.0 - 2.0 * root_fidelity(a, b)))


def trace_distance(a, b) -> float:
    a, b = _pair(a, b)
    d = a - b
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T)))))


def _distribution(p, name):
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise NotDistribution(f"{name} must be a non-empty vector")
    if np.any(p < -DIST_TOL) or abs(p.sum() - 1.0) > DIST_TOL:
        raise NotDistribution(f"{name} is not a probability vector")
    return np.clip(p, 0.0, None)


def hellinger_affinity(p, q) -> float:
    """``sum_i sqrt(p_i q_i)`` for two probability vectors."""
    p, q = _distribution(p, "p"), _distribution(q, "q")
    if p.shape != q.shape:
        raise DimensionMismatch(f"lengths {p.size} and {q.size} differ")
    return float(np.sum(np.sqrt(p * q)))


def log_hs_normalization(n: int) -> float:
    if int(n) != n or n < 1:
        raise InvalidParameter(f"dimension must be a positive integer, got {n!r}")
    n = int(n)
    return math.lgamma(n * n) - sum(math.lgamma(k) + math.lgamma(k + 1) for k in range(1, n + 1))


def hs_normalization(n: int) -> float:
    """Constant ``Gamma(N^2) / prod_k Gamma(k) Gamma(k+1)`` of the HS eigenvalue density."""
    return math.exp(log_hs_normalization(n))


def hs_eigenvalue_density(lams) -> float:
    """Joint eigenvalue density of HS random states, ``C_N prod_{i<j} (l_i - l_j)^2``."""
    lam = np.asarray(lams, dtype=np.float64)
    if lam.ndim != 1 or lam.size == 0:
        raise NotDistribution("spectrum must be a non-empty vector")
    if np.any(lam < 0) or abs(lam.sum() - 1.0) > SPECTRUM_TOL:
        raise NotDistribution("spectrum is not on the simplex")
    vandermonde = math.prod((x - y) ** 2 for x, y in combinations(lam.tolist(), 2))
    return hs_normalization(lam.size) * vandermonde


def mean_fidelity_2K(k: int) -> float:
    """Mean fidelity between two independent qubit states drawn from the induced measure.

    At ``k = 1`` the Gamma(k - 1) pole makes the correction vanish and the
    value is exactly 1/2 (random pure states).
    """
    if int(k) != k or k < 1:
        raise InvalidParameter(f"ancilla dimension must be a positive integer, got {k!r}")
    k = int(k)
    if k == 1:
        return 0.5
    # Pochhammer ratios keep full precision where differences of lgamma cancel
    ratio = poch(k - 1, 0.5) * poch(k + 1, -0.5)
    return 0.5 + 0.5 * ratio * ratio


def induced_mean_purity(n: int, k: int) -> float:
    """Mean ``tr rho^2`` under the induced measure: ``(N + K) / (N K + 1)``."""
    return (n + k) / (n * k + 1)
