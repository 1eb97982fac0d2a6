"""Multi-UE blind-decode simulator.

Each slot: enumerate candidates per UE, apply the monitoring budget,
greedily place pending DCIs on free candidates, encode them onto the
resource grid, then let every UE blind-decode exactly its mapped
candidates. Fully deterministic for a given seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .beam_control import (
    EVENT_MEASURE,
    EVENT_RESPONSE,
    PHASE_PRACH_SENT,
    BfrConfig,
    BfrState,
    bfr_step,
)
from .core_model import CellConfig, validate_cell
from .dci_codec import (
    CODED_BITS_PER_CCE,
    CRC_LEN,
    DEFAULT_SUITE,
    MIN_PAYLOAD_BITS,
    CodecSuite,
    DciMessage,
    encode_candidate,
    blind_decode,
    qpsk_demodulate,
    qpsk_modulate,
    scramble_init_from_cell,
    scramble_init_from_ue,
)
from .errors import ConfigurationError
from .monitoring_budget import (
    CellGroupCa,
    UeCapability,
    allocate_slot,
    build_demands,
    non_ca_limits,
    overbooking_limits,
)
from .resource_mapping import candidate_payload_res
from .search_space import AGGREGATION_LEVELS, PdcchCandidate, enumerate_candidates

IDLE_SYMBOL = (1 + 1j) / np.sqrt(2.0)  # QPSK point for unoccupied REs

BLOCK_NO_CANDIDATE = "no_candidate"
BLOCK_SS_DROPPED = "ss_dropped"
BLOCK_RATE_UNFIT = "rate_unfit"
BLOCK_CCE_OCCUPIED = "cce_occupied"


@dataclass(frozen=True)
class UeBfrScript:
    config: BfrConfig
    measurements: dict  # slot -> {rs id -> quality}
    response_delay: int = 1


@dataclass(frozen=True)
class UeConfig:
    rnti: int
    capability: UeCapability = UeCapability()
    ss_indices: Optional[tuple[int, ...]] = None  # None monitors every configured set
    scramble_mode: str = "cell"
    scrambling_id: int = 0
    bfr: Optional[UeBfrScript] = None

    def scramble_init(self, cell: CellConfig) -> int:
        if self.scramble_mode == "ue":
            return scramble_init_from_ue(self.scrambling_id, self.rnti)
        return scramble_init_from_cell(cell.phys_cell_id)


@dataclass(frozen=True)
class TrafficItem:
    slot: int
    rnti: int
    format_id: str
    payload_bits: Optional[int] = None  # None: use the cell's dci_sizes entry
    preferred_level: int = 4


@dataclass(frozen=True)
class TrafficPattern:
    period: int
    offset: int
    rnti: int
    format_id: str
    payload_bits: Optional[int] = None
    preferred_level: int = 4


@dataclass(frozen=True)
class Scenario:
    cell: CellConfig
    ues: tuple[UeConfig, ...] = ()
    traffic: tuple[TrafficItem, ...] = ()
    patterns: tuple[TrafficPattern, ...] = ()
    horizon: int = 1
    seed: int = 0
    bit_flip_prob: float = 0.0
    ca: Optional[CellGroupCa] = None


@dataclass(frozen=True)
class SlotDci:
    dci_id: int
    rnti: int
    format_id: str
    payload_bits: int
    preferred_level: int


@dataclass(frozen=True)
class Placement:
    dci: SlotDci
    candidate: PdcchCandidate


def validate_scenario(sc: Scenario) -> list[str]:
    """Scenario-level problems as plain messages; cell violations included."""
    problems = [f"{v.code} at {v.target}: {v.message}" for v in validate_cell(sc.cell)]
    if sc.horizon < 1:
        problems.append("horizon must be at least 1")
    if not 0.0 <= sc.bit_flip_prob < 1.0:
        problems.append("bit_flip_prob must be in [0, 1)")
    rntis = {u.rnti for u in sc.ues}
    if len(rntis) != len(sc.ues):
        problems.append("duplicate UE rnti")
    if 0 in rntis:
        problems.append("rnti 0 is reserved")
    ss_indices = {s.index for s in sc.cell.search_spaces}
    for u in sc.ues:
        if u.capability.n_cells_cap < 4:
            problems.append(f"ue {u.rnti}: reported CA capability must be at least 4 cells")
        if u.ss_indices is not None:
            for s in u.ss_indices:
                if s not in ss_indices:
                    problems.append(f"ue {u.rnti}: unknown SS set {s}")
        if u.bfr is not None and u.bfr.config.ss_bfr not in ss_indices:
            problems.append(f"ue {u.rnti}: BFR references unknown SS set {u.bfr.config.ss_bfr}")
    for t in list(sc.traffic) + list(sc.patterns):
        if t.rnti not in rntis:
            problems.append(f"traffic targets unconfigured rnti {t.rnti}")
        if t.preferred_level not in AGGREGATION_LEVELS:
            problems.append(f"traffic preferred level {t.preferred_level} invalid")
        if t.payload_bits is None and t.format_id not in sc.cell.dci_sizes:
            problems.append(f"no payload size known for format {t.format_id} "
                            "(set cell dci_sizes or the traffic 'bits' field)")
    return problems


def _traffic_for_slot(sc: Scenario, slot: int, next_id: int) -> tuple[list[SlotDci], int]:
    out = []
    for t in sc.traffic:
        if t.slot == slot:
            size = t.payload_bits if t.payload_bits is not None else sc.cell.dci_sizes[t.format_id]
            out.append(SlotDci(next_id, t.rnti, t.format_id, size, t.preferred_level))
            next_id += 1
    for p in sc.patterns:
        if slot >= p.offset and (slot - p.offset) % p.period == 0:
            size = p.payload_bits if p.payload_bits is not None else sc.cell.dci_sizes[p.format_id]
            out.append(SlotDci(next_id, p.rnti, p.format_id, size, p.preferred_level))
            next_id += 1
    return out, next_id


def schedule_slot(dcis, candidates_by_rnti, all_candidates_by_rnti, cell: CellConfig):
    """Greedy first-fit placement in traffic order.

    Tries the preferred aggregation level first, then each lower
    configured level; a DCI whose CCEs would overlap an earlier placement
    in the same CORESET and occasion is blocked.
    """
    occupied: dict[tuple[int, int], set[int]] = {}
    placements: list[Placement] = []
    blocked: list[tuple[SlotDci, str]] = []
    formats_of_ss = {s.index: set(s.monitored_formats) for s in cell.search_spaces}

    for dci in dcis:
        mapped = [c for c in candidates_by_rnti.get(dci.rnti, [])
                  if dci.format_id in formats_of_ss.get(c.ss_index, ())]
        everything = [c for c in all_candidates_by_rnti.get(dci.rnti, [])
                      if dci.format_id in formats_of_ss.get(c.ss_index, ())]
        if not everything:
            blocked.append((dci, BLOCK_NO_CANDIDATE))
            continue
        if not mapped:
            blocked.append((dci, BLOCK_SS_DROPPED))
            continue
        block_len = max(dci.payload_bits, MIN_PAYLOAD_BITS) + CRC_LEN
        levels = [lv for lv in sorted(AGGREGATION_LEVELS, reverse=True)
                  if lv <= dci.preferred_level]
        placed = None
        saw_fit_level = False
        saw_rate_unfit = False
        for level in levels:
            level_cands = [c for c in mapped if c.level == level]
            if not level_cands:
                continue
            if block_len > level * CODED_BITS_PER_CCE:
                saw_rate_unfit = True
                continue
            saw_fit_level = True
            for cand in level_cands:
                used = occupied.setdefault((cand.coreset_index, cand.start_symbol), set())
                if used.isdisjoint(cand.cces):
                    used.update(cand.cces)
                    placed = Placement(dci, cand)
                    break
            if placed:
                break
        if placed:
            placements.append(placed)
        elif saw_fit_level:
            blocked.append((dci, BLOCK_CCE_OCCUPIED))
        elif saw_rate_unfit:
            blocked.append((dci, BLOCK_RATE_UNFIT))
        else:
            blocked.append((dci, BLOCK_NO_CANDIDATE))
    return placements, blocked


def _flip_bits(symbols: np.ndarray, prob: float, rng) -> np.ndarray:
    bits = qpsk_demodulate(symbols)
    flips = (rng.random(bits.size) < prob).astype(np.uint8)
    return qpsk_modulate(bits ^ flips)


def run(scenario: Scenario, suite: Optional[CodecSuite] = None) -> dict:
    """Execute the scenario; returns deterministic, JSON-ready statistics."""
    suite = suite or DEFAULT_SUITE
    problems = validate_scenario(scenario)
    if problems:
        raise ConfigurationError("scenario invalid: " + "; ".join(problems))
    cell = scenario.cell
    rng = np.random.default_rng(scenario.seed)

    if cell.bwps:
        mu = min(cell.bwps, key=lambda b: b.index).numerology.mu
    else:
        mu = 0
    limits_for = {}
    for ue in scenario.ues:
        if scenario.ca is not None:
            limits_for[ue.rnti] = overbooking_limits(ue.capability, scenario.ca, mu)
        else:
            limits_for[ue.rnti] = non_ca_limits(mu)

    per_ue = {ue.rnti: {"scheduled": 0, "placed": 0, "decoded": 0, "missed": 0, "blocked": 0}
              for ue in scenario.ues}
    blocked_reasons: dict[str, int] = {}
    drops: list[dict] = []
    cce_histogram: dict[int, int] = {}
    bfr_log: dict[int, list[dict]] = {}
    bfr_state: dict[int, BfrState] = {}
    bfr_prach_slot: dict[int, int] = {}
    false_accepts = 0
    totals = {"scheduled": 0, "placed": 0, "decoded": 0, "missed": 0, "blocked": 0}
    next_id = 0
    inits = {ue.rnti: ue.scramble_init(cell) for ue in scenario.ues}
    hypotheses_for_ss = {
        s.index: tuple((f, cell.dci_sizes[f]) for f in s.monitored_formats if f in cell.dci_sizes)
        for s in cell.search_spaces
    }

    for ue in scenario.ues:
        if ue.bfr is not None:
            bfr_state[ue.rnti] = BfrState.initial()
            bfr_log[ue.rnti] = []

    for slot in range(scenario.horizon):
        for ue in scenario.ues:
            if ue.bfr is None:
                continue
            state = bfr_state[ue.rnti]
            if state.phase == PHASE_PRACH_SENT and \
                    slot >= bfr_prach_slot[ue.rnti] + ue.bfr.response_delay:
                state, actions = bfr_step(state, ue.bfr.config, None, EVENT_RESPONSE)
                bfr_state[ue.rnti] = state
                bfr_log[ue.rnti].append({"slot": slot, "phase": state.phase, "actions": actions})
            meas = ue.bfr.measurements.get(slot)
            if meas is not None:
                state, actions = bfr_step(bfr_state[ue.rnti], ue.bfr.config, meas, EVENT_MEASURE)
                if state != bfr_state[ue.rnti]:
                    bfr_state[ue.rnti] = state
                    if state.phase == PHASE_PRACH_SENT:
                        bfr_prach_slot[ue.rnti] = slot
                    bfr_log[ue.rnti].append({"slot": slot, "phase": state.phase, "actions": actions})

        dcis, next_id = _traffic_for_slot(scenario, slot, next_id)
        for dci in dcis:
            per_ue[dci.rnti]["scheduled"] += 1
        totals["scheduled"] += len(dcis)

        all_cands = {}
        mapped_cands = {}
        for ue in scenario.ues:
            cands = enumerate_candidates(cell, ue.rnti, slot, ue.ss_indices)
            all_cands[ue.rnti] = cands
            report = allocate_slot(build_demands(cell, cands), limits_for[ue.rnti])
            if report.dropped_ss:
                drops.append({"slot": slot, "rnti": ue.rnti, "dropped": list(report.dropped_ss)})
            mapped = set(report.mapped_ss)
            mapped_cands[ue.rnti] = [c for c in cands if c.ss_index in mapped]

        placements, blocked = schedule_slot(dcis, mapped_cands, all_cands, cell)
        for dci, reason in blocked:
            per_ue[dci.rnti]["blocked"] += 1
            totals["blocked"] += 1
            blocked_reasons[reason] = blocked_reasons.get(reason, 0) + 1

        # transmit: lay coded symbols onto the payload REs of each candidate
        re_maps: dict[tuple[int, int], dict] = {}
        by_key: dict[tuple[int, int, tuple[int, ...]], Placement] = {}
        payloads: dict[int, tuple[int, ...]] = {}
        cces_placed = 0
        for pl in placements:
            per_ue[pl.dci.rnti]["placed"] += 1
            totals["placed"] += 1
            cces_placed += len(pl.candidate.cces)
            payload = tuple(int(b) for b in rng.integers(0, 2, pl.dci.payload_bits))
            payloads[pl.dci.dci_id] = payload
            msg = DciMessage(pl.dci.format_id, payload, pl.dci.rnti)
            coded = encode_candidate(msg, pl.candidate.level, suite, inits[pl.dci.rnti])
            symbols = coded.symbols
            if scenario.bit_flip_prob > 0.0:
                symbols = _flip_bits(symbols, scenario.bit_flip_prob, rng)
            coreset = cell.coreset(pl.candidate.coreset_index)
            res = candidate_payload_res(coreset, list(pl.candidate.cces), cell.ssb_start_prb)
            grid = re_maps.setdefault((pl.candidate.coreset_index, pl.candidate.start_symbol), {})
            for re, sym in zip(res, symbols):
                grid[(re.prb, re.symbol, re.subcarrier)] = sym
            by_key[(pl.candidate.coreset_index, pl.candidate.start_symbol,
                    pl.candidate.cces)] = pl
        cce_histogram[cces_placed] = cce_histogram.get(cces_placed, 0) + 1

        # receive: every UE blind-decodes exactly its mapped candidates
        decoded_ids: set[int] = set()
        for ue in scenario.ues:
            seen: set[int] = set()
            for cand in mapped_cands[ue.rnti]:
                hyps = hypotheses_for_ss.get(cand.ss_index, ())
                if not hyps:
                    continue
                grid = re_maps.get((cand.coreset_index, cand.start_symbol))
                if not grid:
                    continue
                coreset = cell.coreset(cand.coreset_index)
                res = candidate_payload_res(coreset, list(cand.cces), cell.ssb_start_prb)
                symbols = np.array([grid.get((re.prb, re.symbol, re.subcarrier), IDLE_SYMBOL)
                                    for re in res])
                msg = blind_decode(symbols, hyps, ue.rnti, suite, inits[ue.rnti])
                if msg is None:
                    continue
                pl = by_key.get((cand.coreset_index, cand.start_symbol, cand.cces))
                if pl is not None and pl.dci.rnti == ue.rnti and \
                        payloads[pl.dci.dci_id] == msg.payload and pl.dci.dci_id not in seen:
                    seen.add(pl.dci.dci_id)
                    decoded_ids.add(pl.dci.dci_id)
                else:
                    false_accepts += 1
        for pl in placements:
            if pl.dci.dci_id in decoded_ids:
                per_ue[pl.dci.rnti]["decoded"] += 1
                totals["decoded"] += 1
            else:
                per_ue[pl.dci.rnti]["missed"] += 1
                totals["missed"] += 1

    stats = {
        "horizon": scenario.horizon,
        "seed": scenario.seed,
        "totals": dict(totals, false_accepts=false_accepts),
        "per_ue": {str(rnti): counts for rnti, counts in per_ue.items()},
        "blocked_reasons": blocked_reasons,
        "overbooking_drops": drops,
        "cce_utilization": {str(k): v for k, v in sorted(cce_histogram.items())},
        "bfr": {str(rnti): events for rnti, events in bfr_log.items()},
    }
    return stats


def stats_to_json(stats: dict) -> str:
    return json.dumps(stats, sort_keys=True, indent=2)
