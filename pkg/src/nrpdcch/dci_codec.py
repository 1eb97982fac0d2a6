"""DCI format registry, the bit-level construction chain, blind decoding,
and the "3+1" size-budget rule.

The construction chain per candidate is

    pad -> CRC attach + RNTI mask -> distribution interleave
        -> FEC to L*108 bits -> scramble -> QPSK -> 54*L symbols

FEC internals sit behind the pluggable CodecSuite; the default suite is a
cyclic-repetition coder with majority-vote decoding, which preserves the
interface lengths of the real coding chain without a Polar implementation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from . import kernels
from .errors import CodecError, DomainError, PayloadTooLarge, SizeAlignmentError

MIN_PAYLOAD_BITS = 12
MAX_PAYLOAD_BITS = 140
CRC_LEN = 24
MAX_CRC_INPUT = MAX_PAYLOAD_BITS + CRC_LEN  # 164-bit interleaver cap
CODED_BITS_PER_CCE = 108
SYMBOLS_PER_CCE = 54

# CRC24C: x^24+x^23+x^21+x^20+x^17+x^15+x^13+x^12+x^8+x^4+x^2+x+1
CRC24_POLY = 0x1B2B117

C_RNTI_CLASS = frozenset({"c", "mcs_c", "cs"})


@dataclass(frozen=True)
class DciFormatInfo:
    format_id: str
    usage: str
    allowed_rnti_types: tuple[str, ...]


DCI_FORMATS: dict[str, DciFormatInfo] = {
    "0_0": DciFormatInfo("0_0", "fallback uplink grant (PUSCH)",
                         ("c", "mcs_c", "cs", "tc")),
    "0_1": DciFormatInfo("0_1", "non-fallback uplink grant (PUSCH)",
                         ("c", "mcs_c", "cs", "sp_csi")),
    "1_0": DciFormatInfo("1_0", "fallback downlink assignment (PDSCH)",
                         ("c", "mcs_c", "cs", "si", "p", "ra", "tc")),
    "1_1": DciFormatInfo("1_1", "non-fallback downlink assignment (PDSCH)",
                         ("c", "mcs_c", "cs")),
    "2_0": DciFormatInfo("2_0", "slot format indication for a UE group",
                         ("sfi",)),
    "2_1": DciFormatInfo("2_1", "preemption indication for a UE group",
                         ("int",)),
    "2_2": DciFormatInfo("2_2", "PUCCH/PUSCH power control commands",
                         ("tpc_pucch", "tpc_pusch")),
    "2_3": DciFormatInfo("2_3", "SRS requests and power control",
                         ("tpc_srs",)),
}


@dataclass(frozen=True)
class DciMessage:
    format_id: str
    payload: tuple[int, ...]
    rnti: int


@dataclass(frozen=True, eq=False)
class CodedPdcch:
    symbols: np.ndarray  # 54*L QPSK points
    level: int
    scramble_init: int


def _as_bits(bits) -> np.ndarray:
    arr = np.asarray(bits, dtype=np.uint8).reshape(-1)
    if arr.size and arr.max() > 1:
        raise DomainError("bit arrays must contain only 0/1")
    return arr


# ---------------------------------------------------------------- CRC chain

def pad_payload(bits) -> np.ndarray:
    """Zero-pad to at least 12 bits; payloads above 140 bits are rejected."""
    arr = _as_bits(bits)
    if arr.size < 1:
        raise DomainError("payload must have at least one bit")
    if arr.size > MAX_PAYLOAD_BITS:
        raise PayloadTooLarge(
            f"{arr.size} payload bits exceed {MAX_PAYLOAD_BITS} "
            f"(CRC interleaver input cap {MAX_CRC_INPUT})")
    if arr.size >= MIN_PAYLOAD_BITS:
        return arr.copy()
    return np.concatenate([arr, np.zeros(MIN_PAYLOAD_BITS - arr.size, dtype=np.uint8)])


def crc24(bits, poly: int = CRC24_POLY) -> np.ndarray:
    return kernels.crc_remainder(_as_bits(bits), poly)


def distribution_pattern(total_len: int) -> np.ndarray:
    """Default CRC-distribution permutation for a payload+CRC block.

    Reads the block in 24 lanes: lane j emits payload bits j, j+24, ...
    followed by CRC bit j, so each CRC bit lands between payload bits
    instead of trailing the block. Invertible for any block length.
    """
    k = total_len - CRC_LEN
    if k < 0:
        raise DomainError("block shorter than the CRC")
    order = []
    for lane in range(CRC_LEN):
        order.extend(range(lane, k, CRC_LEN))
        order.append(k + lane)
    return np.asarray(order, dtype=np.int64)


def identity_pattern(total_len: int) -> np.ndarray:
    """Trivial substitute pattern (no distribution)."""
    return np.arange(total_len, dtype=np.int64)


def _mask_crc(crc: np.ndarray, rnti: int) -> np.ndarray:
    """XOR the 16-bit rnti (MSB first) into CRC positions 8..23."""
    out = crc.copy()
    for i in range(16):
        out[8 + i] ^= (rnti >> (15 - i)) & 1
    return out


def attach_crc_and_mask(bits, rnti: int, suite: Optional["CodecSuite"] = None) -> np.ndarray:
    """Append the masked 24-bit CRC and apply the distribution interleaver."""
    suite = suite or DEFAULT_SUITE
    arr = _as_bits(bits)
    if not MIN_PAYLOAD_BITS <= arr.size <= MAX_PAYLOAD_BITS:
        raise DomainError(f"payload must be {MIN_PAYLOAD_BITS}..{MAX_PAYLOAD_BITS} bits before CRC")
    if not 0 <= rnti <= 0xFFFF:
        raise DomainError("rnti must be a 16-bit value")
    crc = _mask_crc(crc24(arr, suite.crc_poly), rnti)
    block = np.concatenate([arr, crc])
    return block[suite.crc_interleaver(block.size)]


def recover_and_check(block, rnti: int, payload_len: int,
                      suite: Optional["CodecSuite"] = None) -> Optional[np.ndarray]:
    """Invert the interleave/mask/CRC steps; None when the CRC disagrees."""
    suite = suite or DEFAULT_SUITE
    arr = _as_bits(block)
    if arr.size != payload_len + CRC_LEN:
        raise DomainError("block length does not match the hypothesized payload size")
    pattern = suite.crc_interleaver(arr.size)
    deinterleaved = np.empty_like(arr)
    deinterleaved[pattern] = arr
    payload, crc = deinterleaved[:payload_len], deinterleaved[payload_len:]
    if np.array_equal(_mask_crc(crc, rnti), crc24(payload, suite.crc_poly)):
        return payload
    return None


# --------------------------------------------------------- default FEC + PRNG

def repetition_encode(bits, target_len: int) -> np.ndarray:
    """Repeat the block cyclically to exactly target_len bits.

    A block longer than the target would lose information under any code
    (rate above 1), so that case is rejected rather than truncated.
    """
    arr = _as_bits(bits)
    if arr.size == 0:
        raise CodecError("cannot encode an empty block")
    if arr.size > target_len:
        raise CodecError(
            f"{arr.size} bits do not fit losslessly in {target_len} coded bits (rate > 1)")
    reps = -(-target_len // arr.size)
    return np.tile(arr, reps)[:target_len]


def repetition_decode(coded, block_len: int, strict: bool = False) -> Optional[np.ndarray]:
    """Majority vote per block position; ties resolve to 0.

    strict=True returns None unless every repetition agrees, which turns
    any bit corruption into a detected erasure.
    """
    arr = _as_bits(coded)
    if block_len < 1 or block_len > arr.size:
        raise CodecError("block length must be in 1..len(coded)")
    idx = np.arange(arr.size) % block_len
    ones = np.bincount(idx, weights=arr, minlength=block_len)
    copies = np.bincount(idx, minlength=block_len)
    if strict and np.any((ones != 0) & (ones != copies)):
        return None
    return (2 * ones > copies).astype(np.uint8)


def gold_scrambler(c_init: int, length: int) -> np.ndarray:
    """Scrambling stream from the length-31 Gold sequence (1600-step offset)."""
    return kernels.gold_sequence(c_init, length)


def scramble_init_from_cell(phys_cell_id: int) -> int:
    return phys_cell_id & 0x7FFFFFFF


def scramble_init_from_ue(scrambling_id: int, rnti: int) -> int:
    """UE-specific initialization combining the scrambling id and C-RNTI."""
    return ((rnti << 16) + scrambling_id) & 0x7FFFFFFF


# ------------------------------------------------------------------- QPSK

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def qpsk_modulate(bits) -> np.ndarray:
    """Bit pair (b0, b1) -> ((1-2*b0) + j(1-2*b1)) / sqrt(2)."""
    arr = _as_bits(bits)
    if arr.size % 2:
        raise CodecError("QPSK needs an even number of bits")
    pairs = arr.reshape(-1, 2).astype(np.float64)
    return ((1 - 2 * pairs[:, 0]) + 1j * (1 - 2 * pairs[:, 1])) * _INV_SQRT2


def qpsk_demodulate(symbols) -> np.ndarray:
    arr = np.asarray(symbols, dtype=np.complex128).reshape(-1)
    bits = np.empty(2 * arr.size, dtype=np.uint8)
    bits[0::2] = arr.real < 0
    bits[1::2] = arr.imag < 0
    return bits


# ------------------------------------------------------------------- suite

@dataclass(frozen=True)
class CodecSuite:
    """Pluggable FEC / CRC / scrambling bundle used by the coding chain."""

    fec_encode: Callable[[np.ndarray, int], np.ndarray]
    fec_decode: Callable[[np.ndarray, int], Optional[np.ndarray]]
    crc_poly: int
    scrambler: Callable[[int, int], np.ndarray]
    crc_interleaver: Callable[[int], np.ndarray]


DEFAULT_SUITE = CodecSuite(
    fec_encode=repetition_encode,
    fec_decode=repetition_decode,
    crc_poly=CRC24_POLY,
    scrambler=gold_scrambler,
    crc_interleaver=distribution_pattern,
)


def encode_candidate(msg: DciMessage, level: int, suite: Optional[CodecSuite] = None,
                     scramble_init: int = 0) -> CodedPdcch:
    """Run the full chain for one candidate; 54*L QPSK symbols out."""
    suite = suite or DEFAULT_SUITE
    if level not in (1, 2, 4, 8, 16):
        raise DomainError(f"aggregation level must be 1/2/4/8/16, got {level}")
    padded = pad_payload(np.asarray(msg.payload, dtype=np.uint8))
    block = attach_crc_and_mask(padded, msg.rnti, suite)
    n_coded = level * CODED_BITS_PER_CCE
    coded = suite.fec_encode(block, n_coded)
    if coded.size != n_coded:
        raise CodecError(f"fec_encode produced {coded.size} bits, expected {n_coded}")
    scrambled = coded ^ suite.scrambler(scramble_init, n_coded)
    return CodedPdcch(qpsk_modulate(scrambled), level, scramble_init)


def blind_decode(symbols, hypotheses: Iterable[tuple[str, int]], rnti: int,
                 suite: Optional[CodecSuite] = None, scramble_init: int = 0) -> Optional[DciMessage]:
    """Try payload-size hypotheses against one candidate's symbols.

    hypotheses are (format id, payload bits) pairs; the first whose
    unmasked CRC checks wins. Failure is a value (None), not an error.
    """
    suite = suite or DEFAULT_SUITE
    arr = np.asarray(symbols, dtype=np.complex128).reshape(-1)
    if arr.size % SYMBOLS_PER_CCE:
        raise DomainError(f"symbol count must be a multiple of {SYMBOLS_PER_CCE}")
    n_coded = 2 * arr.size
    received = qpsk_demodulate(arr) ^ suite.scrambler(scramble_init, n_coded)
    for format_id, size in hypotheses:
        if not 1 <= size <= MAX_PAYLOAD_BITS:
            continue
        padded_len = max(size, MIN_PAYLOAD_BITS)
        block_len = padded_len + CRC_LEN
        if block_len > n_coded:
            continue  # rate > 1: could not have been encoded here
        block = suite.fec_decode(received, block_len)
        if block is None:
            continue
        payload = recover_and_check(block, rnti, padded_len, suite)
        if payload is not None:
            return DciMessage(format_id, tuple(int(b) for b in payload[:size]), rnti)
    return None


# ------------------------------------------------------------- size budget

@dataclass(frozen=True)
class SizeBudgetResult:
    ok: bool
    c_rnti_sizes: tuple[int, ...]
    extra_special_sizes: tuple[int, ...]
    offending_formats: tuple[str, ...]


def _rnti_types_for(format_id: str, rnti_types: Optional[Mapping[str, Sequence[str]]]) -> tuple[str, ...]:
    if rnti_types is not None and format_id in rnti_types:
        return tuple(rnti_types[format_id])
    info = DCI_FORMATS.get(format_id)
    if info is None:
        raise DomainError(f"unknown DCI format {format_id!r}")
    return info.allowed_rnti_types


def check_size_budget(sizes: Mapping[str, int],
                      rnti_types: Optional[Mapping[str, Sequence[str]]] = None) -> SizeBudgetResult:
    """The 3+1 rule: at most 3 distinct sizes under the C-RNTI class
    (C, MCS-C, CS) plus at most one further size under special RNTIs.

    rnti_types restricts which RNTIs each format is actually monitored
    with; by default every RNTI the registry allows counts.
    """
    c_sizes: set[int] = set()
    special_sizes: set[int] = set()
    c_formats: list[str] = []
    special_formats: list[str] = []
    for format_id in sorted(sizes):
        types = set(_rnti_types_for(format_id, rnti_types))
        size = int(sizes[format_id])
        if types & C_RNTI_CLASS:
            c_sizes.add(size)
            c_formats.append(format_id)
        if types - C_RNTI_CLASS:
            special_sizes.add(size)
            special_formats.append(format_id)
    extra = special_sizes - c_sizes
    offending: list[str] = []
    if len(c_sizes) > 3:
        offending.extend(c_formats)
    if len(extra) > 1:
        offending.extend(f for f in special_formats if f not in offending)
    return SizeBudgetResult(
        ok=not offending,
        c_rnti_sizes=tuple(sorted(c_sizes)),
        extra_special_sizes=tuple(sorted(extra)),
        offending_formats=tuple(offending),
    )


def _pad_pair(sizes: dict[str, int], a: str, b: str) -> None:
    if a in sizes and b in sizes and sizes[a] != sizes[b]:
        sizes[a] = sizes[b] = max(sizes[a], sizes[b])


def align_sizes(sizes: Mapping[str, int],
                rnti_types: Optional[Mapping[str, Sequence[str]]] = None) -> dict[str, int]:
    """Pad format pairs until the 3+1 budget holds.

    The fallback pair 0_0/1_0 always shares one size (smaller padded up).
    When the native set breaks the budget, the non-fallback pair 0_1/1_1
    is padded to a common size as well. Anything still over budget is
    unresolvable and reported with the residual size map.
    """
    adjusted = {f: int(s) for f, s in sizes.items()}
    if check_size_budget(adjusted, rnti_types).ok and not (
            "0_0" in adjusted and "1_0" in adjusted and adjusted["0_0"] != adjusted["1_0"]):
        return adjusted
    initially_ok = check_size_budget(adjusted, rnti_types).ok
    _pad_pair(adjusted, "0_0", "1_0")
    if not initially_ok:
        _pad_pair(adjusted, "0_1", "1_1")
    result = check_size_budget(adjusted, rnti_types)
    if not result.ok:
        raise SizeAlignmentError(
            f"size budget unresolvable; residual sizes {adjusted}", adjusted)
    return adjusted
