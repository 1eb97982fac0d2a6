"""Numerology, bandwidth parts, CORESET geometry and cell-level validation.

Everything here is an immutable value type plus pure functions; the
validator reports invariant breaches as data (a list of coded violations)
rather than raising, so a linter can show all problems at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Optional

from .errors import DomainError

if TYPE_CHECKING:
    from .search_space import SearchSpaceSet

SYMBOLS_PER_SLOT = 14
SUBCARRIERS_PER_PRB = 12
PRBS_PER_GROUP = 6
REGS_PER_CCE = 6
MAX_MU = 4
MAX_BWPS = 4
MAX_CORESETS_PER_BWP = 3
MAX_CORESETS_PER_CELL = 12
MAX_SS_SETS_PER_BWP = 10
MAX_SS_SETS_PER_CELL = 40

INTERLEAVED = "interleaved"
NON_INTERLEAVED = "non_interleaved"
WIDEBAND = "wideband"
NARROWBAND = "narrowband"


def slot_duration_ms(mu: int) -> float:
    """Slot duration 2^-mu ms (exact: a binary fraction)."""
    if not 0 <= mu <= MAX_MU:
        raise DomainError(f"mu must be in 0..{MAX_MU}, got {mu}")
    return 2.0 ** -mu


def slots_per_subframe(mu: int) -> int:
    if not 0 <= mu <= MAX_MU:
        raise DomainError(f"mu must be in 0..{MAX_MU}, got {mu}")
    return 1 << mu


def slots_per_frame(mu: int) -> int:
    """10 subframes of 1 ms each per radio frame."""
    return 10 * slots_per_subframe(mu)


def frame_and_slot(absolute_slot: int, mu: int) -> tuple[int, int]:
    """Decompose a monotonic slot count into (frame, slot within frame)."""
    if absolute_slot < 0:
        raise DomainError("absolute_slot must be non-negative")
    per_frame = slots_per_frame(mu)
    return absolute_slot // per_frame, absolute_slot % per_frame


@dataclass(frozen=True)
class Numerology:
    """Subcarrier-spacing exponent mu; SCS is 15 * 2^mu kHz."""

    mu: int

    @property
    def scs_khz(self) -> int:
        return 15 * (1 << self.mu)

    @property
    def slot_ms(self) -> float:
        return slot_duration_ms(self.mu)

    @property
    def symbols_per_slot(self) -> int:
        return SYMBOLS_PER_SLOT


@dataclass(frozen=True)
class BandwidthPart:
    index: int
    start_prb: int
    num_prbs: int
    numerology: Numerology

    @property
    def end_prb(self) -> int:
        return self.start_prb + self.num_prbs


@dataclass(frozen=True)
class Coreset0Placement:
    """CORESET 0 sits relative to the SSB, off the common 6-PRB grid.

    offset_prb is signed and added to the cell's ssb_start_prb to obtain
    the first PRB of the CORESET.
    """

    offset_prb: int
    num_prbs: int


@dataclass(frozen=True)
class CoresetConfig:
    index: int
    bwp_index: int
    freq_resource: int = 0  # bitmask of 6-PRB groups counted from point A, bit 0 nearest
    duration_symbols: int = 1
    mapping: str = NON_INTERLEAVED
    bundle_size: int = 6
    interleaver_rows: int = 2
    shift: int = 0
    precoder_granularity: str = NARROWBAND
    tci_state_ids: tuple[int, ...] = ()
    dmrs_scrambling_id: int = 0
    coreset0: Optional[Coreset0Placement] = None

    @property
    def is_coreset0(self) -> bool:
        return self.coreset0 is not None

    @property
    def num_prbs(self) -> int:
        if self.coreset0 is not None:
            return self.coreset0.num_prbs
        return PRBS_PER_GROUP * self.freq_resource.bit_count()

    @property
    def num_regs(self) -> int:
        return self.num_prbs * self.duration_symbols

    @property
    def num_cces(self) -> int:
        return self.num_regs // REGS_PER_CCE

    @property
    def num_bundles(self) -> int:
        return self.num_regs // self.bundle_size if self.bundle_size > 0 else 0

    def prb_positions(self, ssb_start_prb: int = 0) -> tuple[int, ...]:
        """Ascending absolute PRB positions (from point A) of the CORESET."""
        if self.coreset0 is not None:
            start = ssb_start_prb + self.coreset0.offset_prb
            return tuple(range(start, start + self.coreset0.num_prbs))
        prbs = []
        group = 0
        mask = self.freq_resource
        while mask:
            if mask & 1:
                base = group * PRBS_PER_GROUP
                prbs.extend(range(base, base + PRBS_PER_GROUP))
            mask >>= 1
            group += 1
        return tuple(prbs)


@dataclass(frozen=True)
class CellConfig:
    phys_cell_id: int
    bwps: tuple[BandwidthPart, ...] = ()
    coresets: tuple[CoresetConfig, ...] = ()
    search_spaces: tuple["SearchSpaceSet", ...] = ()
    point_a: int = 0
    ssb_start_prb: int = 0
    dci_sizes: dict = field(default_factory=dict)  # format id -> payload bits, optional

    def bwp(self, index: int) -> BandwidthPart:
        for b in self.bwps:
            if b.index == index:
                return b
        raise DomainError(f"no BWP with index {index}")

    def coreset(self, index: int) -> CoresetConfig:
        for c in self.coresets:
            if c.index == index:
                return c
        raise DomainError(f"no CORESET with index {index}")

    def search_space(self, index: int) -> "SearchSpaceSet":
        for s in self.search_spaces:
            if s.index == index:
                return s
        raise DomainError(f"no search space set with index {index}")


def coreset_geometry(c: CoresetConfig) -> tuple[int, int, int]:
    """(num_prbs, num_regs, num_cces); each CCE is six REGs."""
    return c.num_prbs, c.num_regs, c.num_cces


@dataclass(frozen=True)
class Violation:
    code: str
    target: str
    message: str


def _v(out: list, code: str, target: str, message: str) -> None:
    out.append(Violation(code, target, message))


def _validate_bwps(cell: CellConfig, out: list) -> None:
    seen = set()
    for b in cell.bwps:
        tgt = f"bwp[{b.index}]"
        if not 0 <= b.index < MAX_BWPS:
            _v(out, "bwp_index_range", tgt, f"BWP index must be 0..{MAX_BWPS - 1}")
        if b.index in seen:
            _v(out, "bwp_index_duplicate", tgt, "duplicate BWP index")
        seen.add(b.index)
        if b.num_prbs < 1:
            _v(out, "bwp_num_prbs", tgt, "BWP must span at least one PRB")
        if not 0 <= b.numerology.mu <= MAX_MU:
            _v(out, "numerology_mu_range", tgt, f"mu must be 0..{MAX_MU}")


def _validate_coreset(cell: CellConfig, c: CoresetConfig, bwps: dict, out: list) -> None:
    tgt = f"coreset[{c.index}]"
    if not 0 <= c.index < MAX_CORESETS_PER_CELL:
        _v(out, "coreset_index_range", tgt, "CORESET index must be 0..11")
    if not 1 <= c.duration_symbols <= 3:
        _v(out, "coreset_duration_range", tgt, "duration must be 1..3 symbols")
    if c.is_coreset0:
        if c.index != 0:
            _v(out, "coreset0_index", tgt, "SSB-relative placement is only valid on index 0")
        if c.coreset0.num_prbs < 1:
            _v(out, "coreset_freq_empty", tgt, "CORESET 0 must span at least one PRB")
        elif (c.coreset0.num_prbs * c.duration_symbols) % REGS_PER_CCE != 0:
            _v(out, "coreset_regs_not_cce_aligned", tgt,
               "PRBs x symbols must be a multiple of 6 to form whole CCEs")
    else:
        if c.freq_resource <= 0:
            _v(out, "coreset_freq_empty", tgt, "freq_resource selects no 6-PRB group")
    if c.bundle_size <= 0 or (1 <= c.duration_symbols <= 3 and c.bundle_size % c.duration_symbols != 0):
        _v(out, "coreset_bundle_size_multiple", tgt,
           "bundle_size must be a positive multiple of duration_symbols")
    elif 6 % c.bundle_size != 0:
        _v(out, "coreset_bundle_size_divides_cce", tgt,
           "bundle_size must divide the 6 REGs of a CCE")
    if c.mapping == NON_INTERLEAVED:
        if c.bundle_size != 6:
            _v(out, "coreset_noninterleaved_bundle", tgt, "non-interleaved mapping uses bundle size 6")
    elif c.mapping == INTERLEAVED:
        if c.interleaver_rows < 1:
            _v(out, "coreset_interleaver_rows", tgt, "interleaver needs at least one row")
        elif c.bundle_size > 0 and c.num_bundles % c.interleaver_rows != 0:
            _v(out, "coreset_bundle_count_divisible", tgt,
               f"bundle count {c.num_bundles} not divisible by {c.interleaver_rows} rows")
    else:
        _v(out, "coreset_mapping_invalid", tgt, f"unknown mapping {c.mapping!r}")
    if c.precoder_granularity not in (WIDEBAND, NARROWBAND):
        _v(out, "coreset_precoder_granularity_invalid", tgt,
           f"unknown precoder granularity {c.precoder_granularity!r}")
    if len(c.tci_state_ids) > 64:
        _v(out, "coreset_tci_count", tgt, "at most 64 TCI states per CORESET")

    bwp = bwps.get(c.bwp_index)
    if bwp is None:
        _v(out, "coreset_unknown_bwp", tgt, f"references missing BWP {c.bwp_index}")
        return
    prbs = c.prb_positions(cell.ssb_start_prb)
    if c.is_coreset0:
        # CORESET 0 belongs to the initial BWP; any other BWP must match
        # the initial numerology and still contain the PRBs.
        initial = bwps.get(0)
        if c.bwp_index != 0:
            if initial is not None and bwp.numerology != initial.numerology:
                _v(out, "coreset0_numerology_mismatch", tgt,
                   "CORESET 0 usable on a non-initial BWP only with matching numerology")
    if prbs and not (bwp.start_prb <= prbs[0] and prbs[-1] < bwp.end_prb):
        _v(out, "coreset_outside_bwp", tgt,
           f"PRBs {prbs[0]}..{prbs[-1]} not contained in BWP {bwp.index} "
           f"({bwp.start_prb}..{bwp.end_prb - 1})")


def _validate_search_space(cell: CellConfig, s, coresets: dict, out: list) -> None:
    from .dci_codec import DCI_FORMATS  # local import keeps module order acyclic
    from .search_space import AGGREGATION_LEVELS

    tgt = f"ss[{s.index}]"
    if not 0 <= s.index < MAX_SS_SETS_PER_CELL:
        _v(out, "ss_index_range", tgt, "SS set index must be 0..39")
    if s.ss_type not in ("css", "uss"):
        _v(out, "ss_type_invalid", tgt, f"unknown SS type {s.ss_type!r}")
    if s.periodicity < 1 or not 0 <= s.offset < max(s.periodicity, 1):
        _v(out, "ss_offset_range", tgt, "require 0 <= offset < periodicity")
    if not 1 <= s.duration <= max(s.periodicity, 1):
        _v(out, "ss_duration_range", tgt, "require 1 <= duration <= periodicity")
    if s.symbol_bitmap <= 0 or s.symbol_bitmap >= (1 << SYMBOLS_PER_SLOT):
        _v(out, "ss_symbol_bitmap_empty", tgt, "monitoring bitmap needs at least one of 14 bits set")
    bad_levels = [lv for lv in s.candidates if lv not in AGGREGATION_LEVELS]
    bad_counts = [lv for lv, n in s.candidates.items() if n < 0]
    if bad_levels or bad_counts:
        _v(out, "ss_candidates_invalid", tgt,
           f"candidate counts must be >= 0 over aggregation levels {AGGREGATION_LEVELS}")
    for f in s.monitored_formats:
        if f not in DCI_FORMATS:
            _v(out, "ss_unknown_dci_format", tgt, f"unknown DCI format {f!r}")
    c = coresets.get(s.coreset_index)
    if c is None:
        _v(out, "ss_unknown_coreset", tgt, f"references missing CORESET {s.coreset_index}")
        return
    if s.symbol_bitmap > 0:
        for sym in range(SYMBOLS_PER_SLOT):
            if s.symbol_bitmap >> sym & 1 and sym + c.duration_symbols > SYMBOLS_PER_SLOT:
                _v(out, "ss_occasion_overflow", tgt,
                   f"occasion at symbol {sym} spans past symbol 13")
    n_cces = c.num_cces
    for lv, n in s.candidates.items():
        if n > 0 and lv in (1, 2, 4, 8, 16) and lv > n_cces:
            _v(out, "ss_candidate_level_exceeds_coreset", tgt,
               f"aggregation level {lv} does not fit in {n_cces} CCEs")


def validate_cell(cell: CellConfig) -> list[Violation]:
    """Check every configuration invariant; returns one coded violation each.

    Deterministic and order-independent: permuting the input lists permutes
    nothing but the report order of same-coded entries.
    """
    out: list[Violation] = []
    _validate_bwps(cell, out)
    bwps = {}
    for b in cell.bwps:
        bwps.setdefault(b.index, b)

    seen = set()
    per_bwp: dict[int, int] = {}
    for c in cell.coresets:
        tgt = f"coreset[{c.index}]"
        if c.index in seen:
            _v(out, "coreset_index_duplicate", tgt, "duplicate CORESET index")
        seen.add(c.index)
        per_bwp[c.bwp_index] = per_bwp.get(c.bwp_index, 0) + 1
    if len(cell.coresets) > MAX_CORESETS_PER_CELL:
        _v(out, "coreset_count_per_cell", "cell", "more than 12 CORESETs configured")
    for bwp_index, n in sorted(per_bwp.items()):
        if n > MAX_CORESETS_PER_BWP:
            _v(out, "coreset_count_per_bwp", f"bwp[{bwp_index}]",
               f"{n} CORESETs on one BWP (limit {MAX_CORESETS_PER_BWP})")
    for c in cell.coresets:
        _validate_coreset(cell, c, bwps, out)

    coresets = {}
    for c in cell.coresets:
        coresets.setdefault(c.index, c)
    seen = set()
    ss_per_bwp: dict[int, int] = {}
    for s in cell.search_spaces:
        if s.index in seen:
            _v(out, "ss_index_duplicate", f"ss[{s.index}]", "duplicate SS set index")
        seen.add(s.index)
        c = coresets.get(s.coreset_index)
        if c is not None:
            ss_per_bwp[c.bwp_index] = ss_per_bwp.get(c.bwp_index, 0) + 1
    if len(cell.search_spaces) > MAX_SS_SETS_PER_CELL:
        _v(out, "ss_count_per_cell", "cell", "more than 40 SS sets configured")
    for bwp_index, n in sorted(ss_per_bwp.items()):
        if n > MAX_SS_SETS_PER_BWP:
            _v(out, "ss_count_per_bwp", f"bwp[{bwp_index}]",
               f"{n} SS sets on one BWP (limit {MAX_SS_SETS_PER_BWP})")
    for s in cell.search_spaces:
        _validate_search_space(cell, s, coresets, out)
    return out
