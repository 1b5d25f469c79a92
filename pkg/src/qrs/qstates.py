"""Random pure states, unitaries, density matrices and dynamical matrices.

All generators take an :class:`~qrs.entropy.EntropySource` as their first
argument and draw everything they need from it, in a fixed order, so a seeded
source reproduces the same objects.

State objects validate their invariants when constructed; building one by
hand from untrusted data (for instance a loaded file) is therefore also a
check.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from .entropy import EntropySource, read_doubles_in
from .errors import Degenerate, InvalidParameter, InvariantViolation, RankDeficient, SingularAncilla
from .linalg import hermitian_eig, partial_trace, qr_unitary
from .randkit import ginibre_matrix, random_simplex

__all__ = [
    "PureState",
    "DensityMatrix",
    "UnitaryMatrix",
    "DynamicalMatrix",
    "MeasureSpec",
    "random_ket",
    "random_product_ket",
    "random_unitary",
    "random_local_unitary",
    "random_state_induced",
    "random_state_hs",
    "random_state_bures",
    "random_product_state",
    "random_dynamical_matrix",
    "density_from_ginibre",
]

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-10
CHANNEL_HERMITIAN_TOL = 1e-10
CHANNEL_PSD_TOL = 1e-8
CHANNEL_TP_TOL = 1e-8
DEGENERATE_TRACE = 1e-300


def _complex_array(data, ndim):
    arr = np.array(data, dtype=np.complex128)
    if arr.ndim != ndim:
        raise InvariantViolation(f"expected {ndim}-d data, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvariantViolation("non-finite entries")
    return arr


def _square_array(data):
    m = _complex_array(data, 2)
    if m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvariantViolation(f"expected a non-empty square matrix, got {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector in C^n; ``factors`` holds the components of a product ket."""

    amplitudes: np.ndarray
    factors: tuple = field(default=(), repr=False)

    def __post_init__(self):
        v = _complex_array(self.amplitudes, 1)
        if v.size == 0:
            raise InvariantViolation("empty ket")
        norm2 = float(np.vdot(v, v).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvariantViolation(f"ket norm^2 is {norm2!r}, not 1")
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self):
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semi-definite, unit-trace matrix.

    ``factors`` holds the local components of a product state.
    """

    matrix: np.ndarray
    factors: tuple = field(default=(), repr=False)

    def __post_init__(self):
        m = _square_array(self.matrix)
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise InvariantViolation("density matrix is not Hermitian within 1e-12")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvariantViolation(f"density matrix trace is {tr!r}, not 1")
        lam_min = np.linalg.eigvalsh(m)[0]
        if lam_min < -PSD_TOL:
            raise InvariantViolation(f"density matrix has eigenvalue {lam_min:.3e}")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def purity(self) -> float:
        # tr(rho^2) for Hermitian rho is the squared Frobenius norm
        return float(np.sum(np.abs(self.matrix) ** 2))

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    matrix: np.ndarray
    factors: tuple = field(default=(), repr=False)

    def __post_init__(self):
        u = _square_array(self.matrix)
        err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        if err > UNITARY_TOL:
            raise InvariantViolation(f"||U^dag U - I||_max = {err:.3e}")
        object.__setattr__(self, "matrix", u)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


@dataclass(frozen=True, eq=False)
class DynamicalMatrix:
    """Positive ``n^2 x n^2`` matrix of a trace-preserving channel on C^n.

    The channel acts on the second tensor factor; tracing out the first
    factor gives the identity.
    """

    matrix: np.ndarray
    system_dim: int

    def __post_init__(self):
        d = _square_array(self.matrix)
        n = int(self.system_dim)
        if n < 1 or d.shape[0] != n * n:
            raise InvariantViolation(f"side {d.shape[0]} is not {n}^2")
        if np.max(np.abs(d - d.conj().T)) > CHANNEL_HERMITIAN_TOL:
            raise InvariantViolation("dynamical matrix is not Hermitian within 1e-10")
        tr = np.trace(d).real
        lam_min = np.linalg.eigvalsh(d)[0]
        if lam_min < -CHANNEL_PSD_TOL * tr:
            raise InvariantViolation(f"dynamical matrix has eigenvalue {lam_min:.3e}")
        reduced = partial_trace(d, (n, n), 1)
        err = np.max(np.abs(reduced - np.eye(n)))
        if err > CHANNEL_TP_TOL:
            raise InvariantViolation(f"partial trace deviates from identity by {err:.3e}")
        object.__setattr__(self, "matrix", d)
        object.__setattr__(self, "system_dim", n)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


_INDUCED_RE = re.compile(r"^(?:induced[:=]?)?(\d+)$")


@dataclass(frozen=True)
class MeasureSpec:
    """Which measure to sample mixed states from: ``hs``, ``bures`` or ``induced`` with ancilla K."""

    kind: str
    ancilla: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("hs", "bures", "induced"):
            raise InvalidParameter(f"unknown measure {self.kind!r}")
        if self.kind == "induced":
            if self.ancilla is None or int(self.ancilla) < 1:
                raise InvalidParameter("induced measure needs an ancilla dimension K >= 1")
        elif self.ancilla is not None:
            raise InvalidParameter(f"{self.kind} measure takes no ancilla dimension")

    @classmethod
    def hs(cls):
        return cls("hs")

    @classmethod
    def bures(cls):
        return cls("bures")

    @classmethod
    def induced(cls, k: int):
        return cls("induced", int(k))

    @classmethod
    def parse(cls, text) -> "MeasureSpec":
        """Parse ``"HS"``, ``"Bures"``, ``"induced:K"`` or a bare integer K."""
        if isinstance(text, MeasureSpec):
            return text
        if isinstance(text, int):
            return cls.induced(text)
        t = str(text).strip().lower()
        if t in ("hs", "bures"):
            return cls(t)
        m = _INDUCED_RE.match(t)
        if m:
            return cls.induced(int(m.group(1)))
        raise InvalidParameter(f"cannot parse measure {text!r}")

    def __str__(self):
        return f"induced:{self.ancilla}" if self.kind == "induced" else self.kind


def _check_dim(n, name="dimension"):
    if int(n) != n or n < 1:
        raise InvalidParameter(f"{name} must be a positive integer, got {n!r}")
    return int(n)


def _check_dims(dims):
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise InvalidParameter(f"dimensions must be positive, got {dims}")
    return dims


def random_ket(src: EntropySource, n: int) -> PureState:
    """Fubini-Study random pure state.

    Moduli come from the square roots of a uniform simplex point; the first
    amplitude is kept real and non-negative, the others get independent
    uniform phases.
    """
    n = _check_dim(n)
    amps = np.sqrt(random_simplex(src, n).weights).astype(np.complex128)
    if n > 1:
        amps[1:] *= np.exp(1j * read_doubles_in(src, 0.0, 2.0 * math.pi, n - 1))
    return PureState(amps)


def random_product_ket(src: EntropySource, dims: Sequence[int]) -> PureState:
    factors = tuple(random_ket(src, d) for d in _check_dims(dims))
    amps = reduce(np.kron, (f.amplitudes for f in factors))
    return PureState(amps, factors=factors)


def _haar_from_ginibre(g):
    q, r = qr_unitary(g)
    d = np.diag(r)
    # fix the column phases so that R has a positive diagonal
    return q * (d / np.abs(d))


def random_unitary(src: EntropySource, n: int) -> UnitaryMatrix:
    """Haar random unitary from the phase-corrected QR of a Ginibre matrix."""
    n = _check_dim(n)
    try:
        u = _haar_from_ginibre(ginibre_matrix(src, n, n))
    except RankDeficient:
        u = _haar_from_ginibre(ginibre_matrix(src, n, n))
    return UnitaryMatrix(u)


def random_local_unitary(src: EntropySource, dims: Sequence[int]) -> UnitaryMatrix:
    factors = tuple(random_unitary(src, d) for d in _check_dims(dims))
    return UnitaryMatrix(reduce(np.kron, (f.matrix for f in factors)), factors=factors)


def _normalised_gram(a):
    rho = a @ a.conj().T
    tr = np.trace(rho).real
    if not tr > DEGENERATE_TRACE:
        return None
    rho = rho / tr
    return 0.5 * (rho + rho.conj().T)


def density_from_ginibre(g) -> np.ndarray:
    """``G G^dag / tr(G G^dag)`` as a Hermitian array."""
    rho = _normalised_gram(np.asarray(g, dtype=np.complex128))
    if rho is None:
        raise Degenerate("Ginibre matrix has vanishing norm")
    return rho


def random_state_induced(src: EntropySource, n: int, k: int) -> DensityMatrix:
    """Density matrix from the induced measure with an ancilla of dimension ``k``.

    ``k = 1`` is allowed and gives pure states.
    """
    n, k = _check_dim(n), _check_dim(k, "ancilla dimension")
    for _ in range(2):
        rho = _normalised_gram(ginibre_matrix(src, n, k))
        if rho is not None:
            return DensityMatrix(rho)
    raise Degenerate("Ginibre matrix vanished twice")


def random_state_hs(src: EntropySource, n: int) -> DensityMatrix:
    """Hilbert-Schmidt random density matrix (induced measure with K = n)."""
    n = _check_dim(n)
    return random_state_induced(src, n, n)


def random_state_bures(src: EntropySource, n: int) -> DensityMatrix:
    """Bures random density matrix, ``(1 + U) G G^dag (1 + U^dag)`` normalised."""
    n = _check_dim(n)
    for _ in range(2):
        g = ginibre_matrix(src, n, n)
        u = random_unitary(src, n).matrix
        rho = _normalised_gram((np.eye(n) + u) @ g)
        if rho is not None:
            return DensityMatrix(rho)
    raise Degenerate("Bures construction produced a vanishing matrix twice")


_LOCAL_SAMPLERS = {
    "hs": lambda src, d, spec: random_state_hs(src, d),
    "bures": lambda src, d, spec: random_state_bures(src, d),
    "induced": lambda src, d, spec: random_state_induced(src, d, spec.ancilla),
}


def random_product_state(src: EntropySource, dims: Sequence[int], mu="hs") -> DensityMatrix:
    """Product density matrix whose local factors are drawn from ``mu``."""
    spec = MeasureSpec.parse(mu)
    sample = _LOCAL_SAMPLERS[spec.kind]
    factors = tuple(sample(src, d, spec) for d in _check_dims(dims))
    rho = reduce(np.kron, (f.matrix for f in factors))
    return DensityMatrix(rho, factors=factors)


def _inv_sqrt_pd(y):
    w, v = hermitian_eig(y)
    if w[0] < 1e-12 * w.sum():
        return None
    return (v / np.sqrt(w)) @ v.conj().T


def random_dynamical_matrix(src: EntropySource, n: int, k: int = 0) -> DynamicalMatrix:
    """Random trace-preserving channel on C^n as an ``n^2 x n^2`` dynamical matrix.

    ``W = G G^dag`` with ``G`` Ginibre of shape ``n^2 x (n^2 - k)`` is
    whitened by ``(1 (x) Y^{-1/2})`` where ``Y`` is ``W`` with the first
    factor traced out. The result has rank ``n^2 - k``.
    """
    n = _check_dim(n)
    k = int(k)
    if not 0 <= k <= n * n - 1:
        raise InvalidParameter(f"zero-eigenvalue count must be in [0, {n * n - 1}], got {k}")
    for _ in range(2):
        g = ginibre_matrix(src, n * n, n * n - k)
        w = g @ g.conj().T
        y_isqrt = _inv_sqrt_pd(partial_trace(w, (n, n), 1))
        if y_isqrt is None:
            continue
        whiten = np.kron(np.eye(n), y_isqrt)
        d = whiten @ w @ whiten.conj().T
        return DynamicalMatrix(0.5 * (d + d.conj().T), n)
    raise SingularAncilla("reduced matrix was singular twice")
