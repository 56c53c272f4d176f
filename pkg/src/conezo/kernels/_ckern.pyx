# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Implements the same counter-indexed SplitMix64 + pairwise Box-Muller stream and
the same vector primitives as ``pykern`` (see that module for the stream
contract), as tight C loops: stream regeneration fuses generation with the
consuming vector operation, and reductions run in strict sequential order.
Compiled with -ffp-contract=off so no FMA contraction reorders roundings.
"""
from libc.math cimport cos, log, sin, sqrt
from libc.stdint cimport uint64_t

BACKEND = "ext"

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15UL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9UL
cdef uint64_t MIX2 = 0x94D049BB133111EBUL
cdef double INV53 = 1.0 / 9007199254740992.0
cdef double TWO_PI = 6.283185307179586


cdef inline uint64_t _mix(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * MIX1
    z = (z ^ (z >> 27)) * MIX2
    return z ^ (z >> 31)


cdef inline double _unif(uint64_t key, uint64_t c) nogil:
    return (<double>(_mix(key + (c + 1UL) * GOLDEN) >> 11) + 0.5) * INV53


def stream_key(seed):
    return int(_mix(((<uint64_t>(seed & 0xFFFFFFFFFFFFFFFF)) + 1UL) * GOLDEN))


def uniform_fill(double[::1] out, seed, counter):
    cdef uint64_t key = <uint64_t>stream_key(seed)
    cdef uint64_t c0 = <uint64_t>counter
    cdef Py_ssize_t i, n = out.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _unif(key, c0 + <uint64_t>i)


def normal_fill(double[::1] out, seed, counter):
    cdef uint64_t key = <uint64_t>stream_key(seed)
    cdef uint64_t c0 = <uint64_t>counter
    cdef Py_ssize_t j, n = out.shape[0]
    cdef Py_ssize_t npairs = n // 2
    cdef double r, phi
    with nogil:
        for j in range(npairs):
            r = sqrt(-2.0 * log(_unif(key, c0 + 2 * <uint64_t>j)))
            phi = TWO_PI * _unif(key, c0 + 2 * <uint64_t>j + 1)
            out[2 * j] = r * cos(phi)
            out[2 * j + 1] = r * sin(phi)
        if n & 1:
            r = sqrt(-2.0 * log(_unif(key, c0 + <uint64_t>(n - 1))))
            phi = TWO_PI * _unif(key, c0 + <uint64_t>n)
            out[n - 1] = r * cos(phi)


def normal_sumsq(seed, counter, n):
    cdef uint64_t key = <uint64_t>stream_key(seed)
    cdef uint64_t c0 = <uint64_t>counter
    cdef Py_ssize_t j, m = <Py_ssize_t>n
    cdef Py_ssize_t npairs = m // 2
    cdef double r, phi, a, b, total = 0.0
    with nogil:
        for j in range(npairs):
            r = sqrt(-2.0 * log(_unif(key, c0 + 2 * <uint64_t>j)))
            phi = TWO_PI * _unif(key, c0 + 2 * <uint64_t>j + 1)
            a = r * cos(phi)
            b = r * sin(phi)
            total += a * a
            total += b * b
        if m & 1:
            r = sqrt(-2.0 * log(_unif(key, c0 + <uint64_t>(m - 1))))
            phi = TWO_PI * _unif(key, c0 + <uint64_t>m)
            a = r * cos(phi)
            total += a * a
    return total


def normal_axpy(double[::1] y, double alpha, seed, counter):
    cdef uint64_t key = <uint64_t>stream_key(seed)
    cdef uint64_t c0 = <uint64_t>counter
    cdef Py_ssize_t j, n = y.shape[0]
    cdef Py_ssize_t npairs = n // 2
    cdef double r, phi
    with nogil:
        for j in range(npairs):
            r = sqrt(-2.0 * log(_unif(key, c0 + 2 * <uint64_t>j)))
            phi = TWO_PI * _unif(key, c0 + 2 * <uint64_t>j + 1)
            y[2 * j] += alpha * (r * cos(phi))
            y[2 * j + 1] += alpha * (r * sin(phi))
        if n & 1:
            r = sqrt(-2.0 * log(_unif(key, c0 + <uint64_t>(n - 1))))
            phi = TWO_PI * _unif(key, c0 + <uint64_t>n)
            y[n - 1] += alpha * (r * cos(phi))


def dot(double[::1] x, double[::1] y):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double total = 0.0
    with nogil:
        for i in range(n):
            total += x[i] * y[i]
    return total


def axpy(double[::1] y, double alpha, double[::1] x):
    cdef Py_ssize_t i, n = y.shape[0]
    with nogil:
        for i in range(n):
            y[i] += alpha * x[i]


def scale(double[::1] x, double alpha):
    cdef Py_ssize_t i, n = x.shape[0]
    with nogil:
        for i in range(n):
            x[i] *= alpha


def lincomb(double[::1] out, double a, double[::1] x, double b, double[::1] y):
    cdef Py_ssize_t i, n = out.shape[0]
    with nogil:
        for i in range(n):
            out[i] = a * x[i] + b * y[i]
