"""Sampling primitives that sit between raw entropy and the state generators."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .entropy import EntropySource, read_doubles, read_int_in, read_normals
from .errors import EmptyList, InvalidParameter, TooManyEdges

__all__ = [
    "SimplexPoint",
    "normal_real",
    "normal_array",
    "random_simplex",
    "random_choice",
    "random_graph",
    "ginibre_matrix",
    "edge_index_to_pair",
]

SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class SimplexPoint:
    """A point of the standard simplex: non-negative weights summing to one."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size == 0:
            raise InvalidParameter("simplex weights must be a non-empty vector")
        if np.any(w < 0) or abs(w.sum() - 1.0) > SIMPLEX_TOL:
            raise InvalidParameter("weights are not on the standard simplex")
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.weights.size

    def __array__(self, dtype=None, copy=None):
        return self.weights if dtype is None else self.weights.astype(dtype)


def _check_stddev(stddev):
    if not stddev > 0:
        raise InvalidParameter(f"stddev must be positive, got {stddev}")


def normal_real(src: EntropySource, mean: float = 0.0, stddev: float = 1.0) -> float:
    """One normal variate with the given mean and standard deviation."""
    _check_stddev(stddev)
    return mean + stddev * float(read_normals(src, 1)[0])


def normal_array(src: EntropySource, mean: float, stddev: float, dims: Sequence[int]) -> np.ndarray:
    """Array of independent normal variates, filled in row-major order."""
    _check_stddev(stddev)
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise InvalidParameter(f"dimensions must be positive, got {dims}")
    return mean + stddev * read_normals(src, math.prod(dims)).reshape(dims)


def random_simplex(src: EntropySource, n: int) -> SimplexPoint:
    """Uniform point of the (n-1)-simplex via normalised Exp(1) variates."""
    if n < 1:
        raise InvalidParameter(f"simplex dimension must be positive, got {n}")
    if n == 1:
        return SimplexPoint(np.ones(1))
    while True:
        # 1 - u lies in (0, 1], so the logarithm is always finite
        expo = kernels.neg_log(1.0 - read_doubles(src, n))
        total = expo.sum()
        if total > 0:
            return SimplexPoint(expo / total)


def random_choice(src: EntropySource, items: Sequence):
    """Uniformly chosen element of a non-empty sequence."""
    if len(items) == 0:
        raise EmptyList("cannot choose from an empty list")
    return items[read_int_in(src, 0, len(items) - 1)]


def edge_index_to_pair(index: int, v: int) -> tuple[int, int]:
    """Map ``index`` in ``[0, C(v, 2))`` to the 1-based pair ``(i, j)``, i < j.

    Pairs are enumerated lexicographically: (1,2), (1,3), ..., (1,v), (2,3), ...
    """
    i = 0
    row = v - 1
    while index >= row:
        index -= row
        i += 1
        row -= 1
    return i + 1, i + 2 + index


def random_graph(src: EntropySource, v: int, e: int) -> list[tuple[int, int]]:
    """Simple undirected graph with ``v`` vertices and ``e`` uniformly chosen edges.

    Edge sets are drawn with Floyd's subset algorithm over the pair indices.
    """
    if v < 1:
        raise InvalidParameter(f"need at least one vertex, got {v}")
    if e < 0:
        raise InvalidParameter(f"edge count must be non-negative, got {e}")
    total = v * (v - 1) // 2
    if e > total:
        raise TooManyEdges(f"{v} vertices admit at most {total} edges, asked for {e}")
    chosen = set()
    for j in range(total - e, total):
        t = read_int_in(src, 0, j)
        chosen.add(j if t in chosen else t)
    return sorted(edge_index_to_pair(k, v) for k in chosen)


def ginibre_matrix(src: EntropySource, m: int, n: int) -> np.ndarray:
    """``m x n`` matrix with independent standard complex Gaussian entries.

    Entry ``(k, l)`` takes two consecutive normal variates (real, then
    imaginary part), entries in row-major order.
    """
    if m < 1 or n < 1:
        raise InvalidParameter(f"matrix shape must be positive, got ({m}, {n})")
    z = read_normals(src, 2 * m * n).reshape(m, n, 2)
    return z[..., 0] + 1j * z[..., 1]
