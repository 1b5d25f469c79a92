"""Pure Python/numpy kernels.

Reference behaviour for the compiled module ``_ckernels``; both must produce
bit-identical output. Transcendentals go through :mod:`math` (the platform
libm) rather than numpy ufuncs, whose SIMD paths can differ in the last ulp.
"""
import math

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1
TWO_PI = 2.0 * math.pi
INV_2_53 = 1.0 / 9007199254740992.0

NAME = "python"


def splitmix64_words(state, count):
    """Return ``count`` splitmix64 outputs and the advanced state."""
    idx = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(state) + idx * np.uint64(GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
        z ^= z >> np.uint64(31)
    return z, (state + count * GAMMA) & MASK64


def unit_doubles(buf):
    """Map each 8-byte big-endian word to ``top53 / 2**53``."""
    words = np.frombuffer(buf, dtype=">u8", count=len(buf) // 8)
    return (words >> np.uint64(11)).astype(np.float64) * INV_2_53


def _normals_slow(u, count):
    out = np.empty(count, dtype=np.float64)
    i = produced = 0
    n = len(u)
    while produced < count and i + 1 < n:
        u1 = u[i]
        if u1 == 0.0:
            i += 1
            continue
        out[produced] = math.sqrt(-2.0 * math.log(u1)) * math.cos(TWO_PI * u[i + 1])
        produced += 1
        i += 2
    return out[:produced], i * 8


def box_muller(buf, count):
    """Turn raw bytes into up to ``count`` standard normals.

    Each variate uses two unit uniforms ``(u1, u2)``; a ``u1`` of exactly zero
    is skipped and the next word takes its place.

    Returns:
        ``(normals, consumed_bytes)``. Fewer than ``count`` normals are
        returned when the buffer runs out.
    """
    u = unit_doubles(buf)
    pairs = min(count, len(u) // 2)
    head = u[: 2 * pairs]
    u1 = head[0::2]
    if pairs == count and np.all(u1 != 0.0):
        radius = np.fromiter(map(math.log, u1.tolist()), dtype=np.float64, count=pairs)
        radius = np.sqrt(-2.0 * radius)
        phase = np.fromiter(
            map(math.cos, (TWO_PI * head[1::2]).tolist()), dtype=np.float64, count=pairs
        )
        return radius * phase, 16 * pairs
    return _normals_slow(u, count)


def rejection_ints(buf, width, modulus, limit, count):
    """Draw up to ``count`` integers in ``[0, modulus)`` by rejection.

    ``buf`` is split into big-endian words of ``width`` bytes; words at or
    above ``limit`` are rejected.

    Returns:
        ``(values, consumed_bytes)``.
    """
    if count == 0:
        return np.empty(0, dtype=np.int64), 0
    nwords = len(buf) // width
    raw = np.frombuffer(buf, dtype=np.uint8, count=nwords * width).reshape(nwords, width)
    words = np.zeros(nwords, dtype=np.uint64)
    for j in range(width):
        words = (words << np.uint64(8)) | raw[:, j].astype(np.uint64)
    accepted = np.flatnonzero(words < np.uint64(limit))[:count]
    if len(accepted) == count:
        consumed = (int(accepted[-1]) + 1) * width
    else:
        consumed = nwords * width
    values = (words[accepted] % np.uint64(modulus)).astype(np.int64)
    return values, consumed


def neg_log(u):
    """Elementwise ``-log(u)`` through libm."""
    u = np.asarray(u, dtype=np.float64)
    return -np.fromiter(map(math.log, u.tolist()), dtype=np.float64, count=u.size)
