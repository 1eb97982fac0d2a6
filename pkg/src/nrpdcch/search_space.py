"""Search-space-set timing and candidate placement via the hash function.

A candidate for aggregation level L, index m, in a CORESET with N CCEs
starts at CCE

    L * ((Y + floor(m * N / (L * M))) mod floor(N / L))

and occupies L consecutive CCEs. Y is 0 for common sets; for UE-specific
sets it is a per-slot pseudo-random value derived from the C-RNTI.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .core_model import SYMBOLS_PER_SLOT, CellConfig
from .errors import ConfigurationError, DomainError

AGGREGATION_LEVELS = (1, 2, 4, 8, 16)

CSS = "css"
USS = "uss"

# Multiplicative recurrence constants: Y_{p,-1} = rnti,
# Y_{p,n} = (A_p * Y_{p,n-1}) mod 65537 with A_p selected by p mod 3.
Y_MULTIPLIERS = (39827, 39829, 39839)
Y_MODULUS = 65537


@dataclass(frozen=True)
class SearchSpaceSet:
    index: int
    ss_type: str
    coreset_index: int
    periodicity: int = 1
    offset: int = 0
    duration: int = 1
    symbol_bitmap: int = 1  # bit s set => occasion starting at symbol s
    candidates: dict = field(default_factory=dict)  # aggregation level -> count
    monitored_formats: tuple[str, ...] = ()

    def candidates_for(self, level: int) -> int:
        return int(self.candidates.get(level, 0))

    def start_symbols(self) -> tuple[int, ...]:
        return tuple(s for s in range(SYMBOLS_PER_SLOT) if self.symbol_bitmap >> s & 1)

    @property
    def is_css(self) -> bool:
        return self.ss_type == CSS


@dataclass(frozen=True)
class PdcchCandidate:
    """One blind-decode hypothesis."""

    ss_index: int
    coreset_index: int
    level: int
    candidate_index: int
    cces: tuple[int, ...]
    slot: int
    start_symbol: int


@dataclass(frozen=True)
class YState:
    rnti: int
    coreset_index: int
    slot: int
    value: int


class MultiplicativeY:
    """Default Y randomizer; memoizes the per-(rnti, coreset) prefix.

    The recurrence lands in [0, 65536], one above the nominal 16-bit
    range; callers only ever use the value mod floor(N_CCE / L), so the
    extra point is harmless and is not clamped. Cache entries are
    replaced wholesale (never mutated), so concurrent callers at worst
    recompute the same immutable prefix.
    """

    def __init__(self):
        self._cache: dict[tuple[int, int], tuple[int, ...]] = {}

    def __call__(self, rnti: int, coreset_index: int, slot: int) -> int:
        if rnti == 0:
            raise DomainError("rnti 0 is reserved; Y is undefined")
        if slot < 0:
            raise DomainError("slot must be non-negative")
        key = (rnti & 0xFFFF, coreset_index)
        seq = self._cache.get(key)
        if seq is None or len(seq) <= slot + 1:
            work = list(seq) if seq else [key[0]]  # work[0] = Y_{-1}
            mult = Y_MULTIPLIERS[coreset_index % 3]
            while len(work) <= slot + 1:
                work.append(mult * work[-1] % Y_MODULUS)
            seq = tuple(work)
            self._cache[key] = seq
        return seq[slot + 1]


_default_y = MultiplicativeY()

YRandomizer = Callable[[int, int, int], int]


def y_value(rnti: int, coreset_index: int, slot: int, randomizer: Optional[YRandomizer] = None) -> int:
    """UE-specific per-slot Y; common search space callers bypass this with 0."""
    fn = randomizer if randomizer is not None else _default_y
    return fn(rnti, coreset_index, slot)


def y_for_set(ss: SearchSpaceSet, rnti: int, slot: int,
              randomizer: Optional[YRandomizer] = None) -> int:
    if ss.is_css:
        return 0
    return y_value(rnti, ss.coreset_index, slot, randomizer)


def y_state(rnti: int, coreset_index: int, slot: int,
            randomizer: Optional[YRandomizer] = None) -> YState:
    return YState(rnti, coreset_index, slot, y_value(rnti, coreset_index, slot, randomizer))


def is_monitored_slot(ss: SearchSpaceSet, absolute_slot: int) -> bool:
    """True in the d consecutive slots starting at offset o every period k."""
    if absolute_slot < 0:
        raise DomainError("absolute_slot must be non-negative")
    if absolute_slot < ss.offset:
        return False
    return (absolute_slot - ss.offset) % ss.periodicity < ss.duration


def occasions_in_slot(ss: SearchSpaceSet, coreset_duration: int) -> list[int]:
    """Start symbols of the monitoring occasions within a monitored slot."""
    starts = []
    for sym in ss.start_symbols():
        if sym + coreset_duration > SYMBOLS_PER_SLOT:
            raise ConfigurationError(
                f"occasion at symbol {sym} with duration {coreset_duration} spans past symbol 13")
        starts.append(sym)
    return starts


def candidate_cces(level: int, m: int, num_candidates: int, y: int, n_cce: int) -> list[int]:
    """CCE indices of candidate m at aggregation level L (single-carrier form)."""
    if level not in AGGREGATION_LEVELS:
        raise DomainError(f"aggregation level must be one of {AGGREGATION_LEVELS}")
    if level > n_cce:
        raise DomainError(f"no level-{level} candidate fits in {n_cce} CCEs")
    if not 0 <= m < num_candidates:
        raise DomainError(f"candidate index {m} outside 0..{num_candidates - 1}")
    stride = (m * n_cce) // (level * num_candidates)
    start = level * ((y + stride) % (n_cce // level))
    return list(range(start, start + level))


def enumerate_candidates(cell: CellConfig, rnti: int, absolute_slot: int,
                         ss_indices: Optional[Iterable[int]] = None,
                         randomizer: Optional[YRandomizer] = None) -> list[PdcchCandidate]:
    """All candidates the UE monitors in one slot.

    Ordered by (SS index, occasion, level descending, candidate index
    ascending); the budget accounting depends on this order being stable.
    """
    wanted = None if ss_indices is None else set(ss_indices)
    out: list[PdcchCandidate] = []
    for ss in sorted(cell.search_spaces, key=lambda s: s.index):
        if wanted is not None and ss.index not in wanted:
            continue
        if not is_monitored_slot(ss, absolute_slot):
            continue
        coreset = cell.coreset(ss.coreset_index)
        y = y_for_set(ss, rnti, absolute_slot, randomizer)
        n_cce = coreset.num_cces
        for start_symbol in occasions_in_slot(ss, coreset.duration_symbols):
            for level in sorted(AGGREGATION_LEVELS, reverse=True):
                m_l = ss.candidates_for(level)
                for m in range(m_l):
                    cces = candidate_cces(level, m, m_l, y, n_cce)
                    out.append(PdcchCandidate(
                        ss_index=ss.index,
                        coreset_index=coreset.index,
                        level=level,
                        candidate_index=m,
                        cces=tuple(cces),
                        slot=absolute_slot,
                        start_symbol=start_symbol,
                    ))
    return out
