"""Pure-Python bit kernels (fallback when the compiled extension is absent).

Both functions are bit-exact twins of the Cython versions in ``_ckernels``.
The Gold generator advances the two 31-bit registers 28 steps at a time with
integer bit tricks (the feedback taps reach at most 3 positions ahead, so 28
new bits are computable in one shot); the CRC is a plain shift register.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

_MASK28 = (1 << 28) - 1
_MASK31 = (1 << 31) - 1


def gold_sequence(c_init: int, length: int, offset: int = 1600) -> np.ndarray:
    """Length-31 Gold sequence c(n) = x1(n+offset) xor x2(n+offset).

    x1(n+31) = x1(n+3) + x1(n),  x1 seeded with a single leading one;
    x2(n+31) = x2(n+3) + x2(n+2) + x2(n+1) + x2(n),  x2 seeded with c_init.
    """
    if not 0 <= c_init < (1 << 31):
        raise ValueError("c_init must fit in 31 bits")
    if length < 0 or offset < 0:
        raise ValueError("length and offset must be non-negative")
    total = offset + length
    x1 = 1
    x2 = c_init
    acc = 0
    produced = 0
    while produced < total:
        acc |= ((x1 ^ x2) & _MASK28) << produced
        n1 = ((x1 >> 3) ^ x1) & _MASK28
        n2 = ((x2 >> 3) ^ (x2 >> 2) ^ (x2 >> 1) ^ x2) & _MASK28
        x1 = ((x1 >> 28) | (n1 << 3)) & _MASK31
        x2 = ((x2 >> 28) | (n2 << 3)) & _MASK31
        produced += 28
    raw = acc.to_bytes((produced + 7) // 8, "little")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    return bits[offset : offset + length].copy()


def crc_remainder(bits, poly: int) -> np.ndarray:
    """Remainder of bits * x^degree modulo poly, MSB first.

    poly carries the full coefficient vector including the leading term,
    e.g. degree 24 means bit 24 of poly is set. No init or final xor.
    """
    degree = poly.bit_length() - 1
    if degree <= 0:
        raise ValueError("poly must have degree >= 1")
    top = 1 << degree
    reg = 0
    for b in np.asarray(bits, dtype=np.uint8).tolist():
        reg = (reg << 1) | b
        if reg & top:
            reg ^= poly
    for _ in range(degree):
        reg <<= 1
        if reg & top:
            reg ^= poly
    return np.array([(reg >> (degree - 1 - i)) & 1 for i in range(degree)], dtype=np.uint8)
