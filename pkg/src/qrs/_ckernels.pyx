# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the entropy-to-variate kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, log, sqrt
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

NAME = "cython"

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL
cdef double TWO_PI = 2.0 * 3.141592653589793
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _load_be(const unsigned char[:] buf, Py_ssize_t pos, int width) nogil:
    cdef uint64_t w = 0
    cdef int j
    for j in range(width):
        w = (w << 8) | buf[pos + j]
    return w


def splitmix64_words(state, Py_ssize_t count):
    cdef uint64_t s = <uint64_t>state
    cdef cnp.ndarray[cnp.uint64_t, ndim=1] out = np.empty(count, dtype=np.uint64)
    cdef uint64_t[:] view = out
    cdef uint64_t z
    cdef Py_ssize_t i
    with nogil:
        for i in range(count):
            s += GAMMA
            z = s
            z = (z ^ (z >> 30)) * MIX1
            z = (z ^ (z >> 27)) * MIX2
            view[i] = z ^ (z >> 31)
    return out, int(s)


def unit_doubles(const unsigned char[:] buf):
    cdef Py_ssize_t n = buf.shape[0] // 8
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[:] view = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            view[i] = <double>(_load_be(buf, 8 * i, 8) >> 11) * INV_2_53
    return out


def box_muller(const unsigned char[:] buf, Py_ssize_t count):
    cdef Py_ssize_t n = buf.shape[0] // 8
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(count, dtype=np.float64)
    cdef double[:] view = out
    cdef Py_ssize_t i = 0, produced = 0
    cdef double u1, u2
    with nogil:
        while produced < count and i + 1 < n:
            u1 = <double>(_load_be(buf, 8 * i, 8) >> 11) * INV_2_53
            if u1 == 0.0:
                i += 1
                continue
            u2 = <double>(_load_be(buf, 8 * (i + 1), 8) >> 11) * INV_2_53
            view[produced] = sqrt(-2.0 * log(u1)) * cos(TWO_PI * u2)
            produced += 1
            i += 2
    return out[:produced], 8 * i


def rejection_ints(const unsigned char[:] buf, int width, modulus, limit, Py_ssize_t count):
    cdef Py_ssize_t nwords = buf.shape[0] // width
    cdef uint64_t m = <uint64_t>modulus
    cdef uint64_t lim = <uint64_t>limit
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(count, dtype=np.int64)
    cdef int64_t[:] view = out
    cdef Py_ssize_t i = 0, produced = 0
    cdef uint64_t w
    with nogil:
        while produced < count and i < nwords:
            w = _load_be(buf, width * i, width)
            i += 1
            if w < lim:
                view[produced] = <int64_t>(w % m)
                produced += 1
    return out[:produced], width * i


def neg_log(u):
    cdef double[:] src = np.ascontiguousarray(u, dtype=np.float64).ravel()
    cdef Py_ssize_t n = src.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef double[:] view = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            view[i] = -log(src[i])
    return out
