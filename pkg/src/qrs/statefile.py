"""JSON documents for generated objects.

One document per object::

    {"kind": "density", "dims": [2], "measure": "hs",
     "data": [[[re, im], ...], ...],
     "meta": {"backend": "prng", "seed": 42, "created": "..."}}

Batches are written as JSON lines. Complex entries are ``[re, im]`` pairs.
Loading re-validates the object against its type invariants.
"""
from __future__ import annotations

import json
import math
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .errors import InvalidParameter, InvariantViolation
from .qstates import DensityMatrix, DynamicalMatrix, MeasureSpec, PureState, UnitaryMatrix
from .randkit import SimplexPoint

__all__ = ["KINDS", "encode_complex", "decode_complex", "make_document", "load_document", "read_documents", "timestamp"]

KINDS = ("ket", "density", "unitary", "dynamical", "ginibre", "graph", "simplex")
EPOCH = "1970-01-01T00:00:00Z"


def timestamp(deterministic: bool = False) -> str:
    if deterministic:
        return EPOCH
    return datetime.now(timezone.utc).isoformat(timespec="seconds").replace("+00:00", "Z")


def encode_complex(a) -> list:
    a = np.asarray(a, dtype=np.complex128)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode_complex(data) -> np.ndarray:
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise InvariantViolation("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def make_document(kind, obj, dims, measure=None, backend=None, seed=None, created=EPOCH) -> dict:
    if kind not in KINDS:
        raise InvalidParameter(f"unknown document kind {kind!r}")
    if kind == "graph":
        data = [list(e) for e in obj]
    elif kind == "simplex":
        data = np.asarray(obj, dtype=np.float64).tolist()
    else:
        data = encode_complex(obj)
    return {
        "kind": kind,
        "dims": [int(d) for d in dims],
        "measure": None if measure is None else str(measure),
        "data": data,
        "meta": {"backend": backend, "seed": seed, "created": created},
    }


def _expect_shape(arr, shape):
    if arr.shape != tuple(shape):
        raise InvariantViolation(f"data shape {arr.shape} does not match dims (expected {tuple(shape)})")


def load_document(doc: dict):
    """Rebuild and validate the object stored in ``doc``.

    Returns:
        :class:`PureState`, :class:`DensityMatrix`, :class:`UnitaryMatrix`,
        :class:`DynamicalMatrix`, :class:`SimplexPoint`, a complex array
        (ginibre) or a list of edges (graph).

    Raises:
        InvariantViolation: malformed document or failed invariant.
    """
    try:
        kind, dims, data = doc["kind"], [int(d) for d in doc["dims"]], doc["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvariantViolation(f"malformed document: {exc}") from exc
    if kind not in KINDS or not dims or any(d < 1 for d in dims):
        raise InvariantViolation(f"bad kind/dims: {kind!r} {dims}")
    side = math.prod(dims)
    if kind == "ket":
        v = decode_complex(data)
        _expect_shape(v, (side,))
        return PureState(v)
    if kind == "density":
        m = decode_complex(data)
        _expect_shape(m, (side, side))
        if doc.get("measure") is not None:
            MeasureSpec.parse(doc["measure"])
        return DensityMatrix(m)
    if kind == "unitary":
        m = decode_complex(data)
        _expect_shape(m, (side, side))
        return UnitaryMatrix(m)
    if kind == "dynamical":
        m = decode_complex(data)
        n = dims[0]
        _expect_shape(m, (n * n, n * n))
        return DynamicalMatrix(m, n)
    if kind == "ginibre":
        g = decode_complex(data)
        _expect_shape(g, dims if len(dims) == 2 else (dims[0], dims[0]))
        if not np.all(np.isfinite(g)):
            raise InvariantViolation("non-finite Ginibre entries")
        return g
    if kind == "simplex":
        w = np.asarray(data, dtype=np.float64)
        _expect_shape(w, (dims[0],))
        try:
            return SimplexPoint(w)
        except InvalidParameter as exc:
            raise InvariantViolation(str(exc)) from exc
    # graph
    v = dims[0]
    edges = [tuple(int(x) for x in e) for e in data]
    if any(len(e) != 2 or not 1 <= e[0] < e[1] <= v for e in edges) or len(set(edges)) != len(edges):
        raise InvariantViolation("graph edges must be distinct pairs 1 <= i < j <= v")
    return edges


def read_documents(path) -> list:
    """Parse a JSON or JSON-lines file into a list of documents."""
    text = Path(path).read_text(encoding="utf-8")
    docs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if line.strip():
            try:
                docs.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise InvariantViolation(f"{path}:{lineno}: {exc}") from exc
    return docs
