"""Reference implementations that share no code with the package.

They use numpy's own PCG64 generator, plain Python integers or mpmath, so a
bug in the package's sampling path cannot leak into the expected values.
"""
import math

import mpmath as mp
import numpy as np

MASK64 = (1 << 64) - 1


def splitmix64(seed, count):
    """Straight transcription of the splitmix64 reference in Python ints."""
    out = []
    s = seed
    for _ in range(count):
        s = (s + 0x9E3779B97F4A7C15) & MASK64
        z = s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        out.append(z ^ (z >> 31))
    return out


def induced_states(rng, n, k, count):
    """Batch of induced-measure states: normalise X X^dag for Gaussian X."""
    x = rng.standard_normal((count, n, k)) + 1j * rng.standard_normal((count, n, k))
    rho = x @ x.conj().transpose(0, 2, 1)
    return rho / np.trace(rho, axis1=1, axis2=2).real[:, None, None]


def induced_purity(rng, n, k, count):
    rho = induced_states(rng, n, k, count)
    p = np.sum(np.abs(rho) ** 2, axis=(1, 2))
    return p.mean(), p.std(ddof=1) / math.sqrt(count)


def qubit_fidelity(a, b):
    """Fidelity of 2x2 states via the closed form tr(ab) + 2 sqrt(det a det b)."""
    tr = np.einsum("...ij,...ji->...", a, b).real
    da = np.clip(np.linalg.det(a).real, 0, None)
    db = np.clip(np.linalg.det(b).real, 0, None)
    return tr + 2 * np.sqrt(da * db)


def hs_constant(n, dps=50):
    with mp.workdps(dps):
        return mp.gamma(n * n) / mp.fprod(mp.gamma(k) * mp.gamma(k + 1) for k in range(1, n + 1))


def mean_fidelity(k, dps=50):
    with mp.workdps(dps):
        if k == 1:
            return mp.mpf(1) / 2
        h = mp.mpf(1) / 2
        r = mp.gamma(k - h) * mp.gamma(k + h) / (mp.gamma(k - 1) * mp.gamma(k + 1))
        return h + h * r**2


def haar_unitary(rng, n):
    """Mezzadri's recipe on numpy's generator."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
