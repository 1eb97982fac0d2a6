"""Command-line surface: lint, dump-mapping, candidates, simulate, vectors.

Exit codes: 0 clean, 1 violations or failures, 2 usage errors (argparse).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys

import numpy as np

from .config_io import load_cell, load_scenario
from .core_model import validate_cell
from .dci_codec import DEFAULT_SUITE, DciMessage, check_size_budget, encode_candidate, qpsk_demodulate
from .errors import PdcchError
from .monitoring_budget import (
    CellGroupCa,
    UeCapability,
    allocate_slot,
    build_demands,
    non_ca_limits,
    overbooking_limits,
)
from .resource_mapping import cce_to_regs, reg_res
from .search_space import enumerate_candidates
from .simulator import run, stats_to_json


def _cmd_lint(args) -> int:
    cell = load_cell(args.config)
    violations = validate_cell(cell)
    for v in violations:
        print(f"violation {v.code} at {v.target}: {v.message}", file=sys.stderr)
    if cell.dci_sizes:
        budget = check_size_budget(cell.dci_sizes)
        if not budget.ok:
            print("violation dci_size_budget: formats "
                  f"{', '.join(budget.offending_formats)} exceed the 3+1 size budget",
                  file=sys.stderr)
    if violations or (cell.dci_sizes and not check_size_budget(cell.dci_sizes).ok):
        return 1

    if args.ca:
        counts = tuple(int(x) for x in args.ca.split(","))
        if len(counts) != 4:
            print("--ca must give 4 comma-separated cell counts (mu=0..3)", file=sys.stderr)
            return 2
        limits = overbooking_limits(UeCapability(args.cap), CellGroupCa(counts), args.mu)
    else:
        limits = non_ca_limits(args.mu)
    overbooked_slots = 0
    for slot in range(args.horizon):
        cands = enumerate_candidates(cell, args.rnti, slot)
        report = allocate_slot(build_demands(cell, cands), limits)
        if report.dropped_ss:
            overbooked_slots += 1
        print(json.dumps({
            "slot": slot,
            "mapped_ss": list(report.mapped_ss),
            "dropped_ss": list(report.dropped_ss),
            "candidates_used": report.candidates_used,
            "cces_used": report.cces_used,
            "limits": list(limits),
        }, sort_keys=True))
    if args.secondary and overbooked_slots:
        print(f"violation secondary_cell_overbooked: demand exceeds limits in "
              f"{overbooked_slots} slot(s); overbooking is only legal on the primary cell",
              file=sys.stderr)
        return 1
    return 0


def _cmd_dump_mapping(args) -> int:
    cell = load_cell(args.config)
    coreset = cell.coreset(args.coreset)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["cce", "reg", "prb", "symbol", "subcarrier", "kind"])
    for cce in range(coreset.num_cces):
        for reg in cce_to_regs(coreset, cce):
            for re in reg_res(coreset, reg, cell.ssb_start_prb):
                writer.writerow([cce, reg, re.prb, re.symbol, re.subcarrier, re.kind])
    return 0


def _parse_slot_range(text: str) -> range:
    if ".." in text:
        first, last = text.split("..", 1)
        return range(int(first), int(last) + 1)
    return range(int(text), int(text) + 1)


def _cmd_candidates(args) -> int:
    cell = load_cell(args.config)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["ss", "slot", "symbol", "L", "m", "first_cce"])
    for slot in _parse_slot_range(args.slots):
        for cand in enumerate_candidates(cell, args.rnti, slot):
            writer.writerow([cand.ss_index, cand.slot, cand.start_symbol,
                             cand.level, cand.candidate_index, cand.cces[0]])
    return 0


def _cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = dataclasses.replace(scenario, seed=args.seed)
    stats = run(scenario)
    print(stats_to_json(stats))
    return 0


def _bits_from_hex(text: str) -> np.ndarray:
    text = text.strip()
    if text.startswith("0x"):
        text = text[2:]
    bits = []
    for ch in text:
        v = int(ch, 16)
        bits.extend((v >> 3 & 1, v >> 2 & 1, v >> 1 & 1, v & 1))
    return np.array(bits, dtype=np.uint8)


def _hex_from_bits(bits: np.ndarray) -> str:
    out = []
    for i in range(0, len(bits), 4):
        nibble = bits[i] << 3 | bits[i + 1] << 2 | bits[i + 2] << 1 | bits[i + 3]
        out.append(format(int(nibble), "x"))
    return "".join(out)


def _cmd_vectors(args) -> int:
    """Check conformance vectors: payload_hex,rnti,L,scramble_init,expected_coded_hex.

    The expected field is the scrambled coded bit stream (pre-QPSK),
    MSB-first per hex digit; payload lengths are multiples of 4 bits.
    """
    failures = 0
    total = 0
    with open(args.file, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            total += 1
            fields = [f.strip() for f in line.split(",")]
            if len(fields) != 5:
                print(f"line {lineno}: FAIL (expected 5 fields)")
                failures += 1
                continue
            payload_hex, rnti_s, level_s, init_s, expected_hex = fields
            payload = _bits_from_hex(payload_hex)
            rnti = int(rnti_s, 0)
            level = int(level_s, 0)
            init = int(init_s, 0)
            msg = DciMessage("1_0", tuple(int(b) for b in payload), rnti)
            coded = encode_candidate(msg, level, DEFAULT_SUITE, init)
            actual_hex = _hex_from_bits(qpsk_demodulate(coded.symbols))
            if actual_hex == expected_hex.lower().removeprefix("0x"):
                print(f"line {lineno}: PASS")
            else:
                print(f"line {lineno}: FAIL (got {actual_hex})")
                failures += 1
    print(f"{total - failures}/{total} vectors passed")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nrpdcch",
        description="Desk-scale 5G NR PDCCH model: linting, mapping dumps, "
                    "candidate tables, blind-decode simulation, codec vectors.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lint", help="validate a cell config and emit per-slot budget JSON lines")
    p.add_argument("config")
    p.add_argument("--horizon", type=int, default=1024)
    p.add_argument("--rnti", type=lambda s: int(s, 0), default=0x4601)
    p.add_argument("--mu", type=int, default=0)
    p.add_argument("--cap", type=int, default=4)
    p.add_argument("--ca", help="serving cells per mu as 'n0,n1,n2,n3' to apply CA limits")
    p.add_argument("--secondary", action="store_true",
                   help="lint as a secondary cell, where overbooking is illegal")
    p.set_defaults(func=_cmd_lint)

    p = sub.add_parser("dump-mapping", help="dump the CCE/REG/RE mapping of one CORESET as CSV")
    p.add_argument("config")
    p.add_argument("--coreset", type=int, required=True)
    p.set_defaults(func=_cmd_dump_mapping)

    p = sub.add_parser("candidates", help="print the candidate table as CSV")
    p.add_argument("config")
    p.add_argument("--rnti", type=lambda s: int(s, 0), required=True)
    p.add_argument("--slots", required=True, help="slot range A..B (inclusive) or single slot")
    p.set_defaults(func=_cmd_candidates)

    p = sub.add_parser("simulate", help="run a scenario and print stats JSON")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("vectors", help="check codec conformance vectors")
    p.add_argument("file")
    p.set_defaults(func=_cmd_vectors)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PdcchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
