# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled bit kernels: Gold sequence generation and CRC long division.

Bit-exact twins of the pure-Python versions in ``_ref_kernels``; the
simulator and blind-decode loops spend most of their time here.
"""

import numpy as np

BACKEND_NAME = "c"


def gold_sequence(unsigned long c_init, Py_ssize_t length, Py_ssize_t offset=1600):
    """Length-31 Gold sequence c(n) = x1(n+offset) xor x2(n+offset)."""
    if c_init >= (1 << 31):
        raise ValueError("c_init must fit in 31 bits")
    if length < 0 or offset < 0:
        raise ValueError("length and offset must be non-negative")
    cdef Py_ssize_t total = offset + length
    cdef Py_ssize_t n, i
    x1_arr = np.zeros(total + 31, dtype=np.uint8)
    x2_arr = np.zeros(total + 31, dtype=np.uint8)
    out_arr = np.empty(length, dtype=np.uint8)
    cdef unsigned char[::1] x1 = x1_arr
    cdef unsigned char[::1] x2 = x2_arr
    cdef unsigned char[::1] out = out_arr
    x1[0] = 1
    for i in range(31):
        x2[i] = (c_init >> i) & 1
    for n in range(total):
        x1[n + 31] = x1[n + 3] ^ x1[n]
        x2[n + 31] = x2[n + 3] ^ x2[n + 2] ^ x2[n + 1] ^ x2[n]
    for i in range(length):
        out[i] = x1[offset + i] ^ x2[offset + i]
    return out_arr


def crc_remainder(bits, unsigned long poly):
    """Remainder of bits * x^degree modulo poly, MSB first."""
    cdef int degree = 0
    cdef unsigned long p = poly
    while p > 1:
        p >>= 1
        degree += 1
    if degree <= 0:
        raise ValueError("poly must have degree >= 1")
    bits_arr = np.ascontiguousarray(bits, dtype=np.uint8)
    cdef unsigned char[::1] b = bits_arr
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t i
    cdef unsigned long reg = 0
    cdef unsigned long top = (<unsigned long> 1) << degree
    for i in range(n):
        reg = (reg << 1) | b[i]
        if reg & top:
            reg ^= poly
    for i in range(degree):
        reg <<= 1
        if reg & top:
            reg ^= poly
    out_arr = np.empty(degree, dtype=np.uint8)
    cdef unsigned char[::1] out = out_arr
    for i in range(degree):
        out[i] = (reg >> (degree - 1 - i)) & 1
    return out_arr
