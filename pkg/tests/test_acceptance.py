"""Acceptance gate: one test per criterion, one printed pass/fail line each.

Run as `pytest tests/test_acceptance.py -v -s` to see the lines. Every
check is exact unless stated; the whole module targets well under five
minutes on the compiled backend and passes on the pure-Python one too.
"""

import contextlib
import itertools
import json
from fractions import Fraction
from math import floor

import numpy as np
import pytest

from nrpdcch.dci_codec import (
    CRC24_POLY,
    DCI_FORMATS,
    DEFAULT_SUITE,
    DciMessage,
    align_sizes,
    blind_decode,
    check_size_budget,
    encode_candidate,
)
from nrpdcch.beam_control import (
    BfrConfig,
    BfrState,
    OverlappingOccasion,
    bfr_step,
    resolve_collision,
)
from nrpdcch.errors import SizeAlignmentError
from nrpdcch.monitoring_budget import (
    CellGroupCa,
    SetDemand,
    UeCapability,
    allocate_slot,
    ca_limits,
    non_ca_limits,
    overbooking_limits,
)
from nrpdcch.resource_mapping import cce_to_regs, interleave_bundles
from nrpdcch.search_space import PdcchCandidate, candidate_cces
from nrpdcch.simulator import Scenario, TrafficItem, TrafficPattern, UeConfig, run, stats_to_json

from conftest import make_cell, make_coreset, make_ss


@contextlib.contextmanager
def criterion(number, label):
    try:
        yield
    except Exception:
        print(f"ACCEPTANCE {number}: FAIL - {label}")
        raise
    print(f"ACCEPTANCE {number}: PASS - {label}")


def test_criterion_1_limit_tables_exact():
    with criterion(1, "non-CA limit tables byte-exact"):
        assert [non_ca_limits(mu) for mu in range(4)] == [(44, 56), (36, 56), (22, 48), (20, 32)]


def test_criterion_2_hash_conformance():
    with criterion(2, "hash matches brute-force formula on the full grid"):
        rng = np.random.default_rng(1002)
        ys = [0] + [int(y) for y in rng.integers(0, 1 << 16, 100)]
        mismatches = 0
        for level in (1, 2, 4, 8, 16):
            for n_cce in range(level, 33):
                per_level = n_cce // level
                for m_l in range(1, 9):
                    for m in range(m_l):
                        stride = (m * n_cce) // (level * m_l)
                        for y in ys:
                            expected_start = level * ((y + stride) % per_level)
                            got = candidate_cces(level, m, m_l, y, n_cce)
                            if got != list(range(expected_start, expected_start + level)):
                                mismatches += 1
                            if not all(0 <= c < n_cce for c in got):
                                mismatches += 1
        assert mismatches == 0


def test_criterion_3_mapping_partition():
    with criterion(3, "CCE mapping partitions REGs; interleaver bijective; transpose closed form"):
        rng = np.random.default_rng(1003)
        legal_bundles = {1: (1, 2, 3, 6), 2: (2, 6), 3: (3, 6)}
        for _ in range(200):
            duration = int(rng.integers(1, 4))
            num_groups = int(rng.integers(1, 96 // 6 + 1))
            bundle = int(rng.choice(legal_bundles[duration]))
            n_bundles = num_groups * 6 * duration // bundle
            if bundle == 6 and rng.integers(0, 2):
                mapping, rows = "non_interleaved", 2
            else:
                mapping = "interleaved"
                rows = int(rng.choice([r for r in (1, 2, 3, 6) if n_bundles % r == 0]))
            c = make_coreset(num_groups=num_groups, duration=duration, mapping=mapping,
                             bundle_size=bundle, rows=rows,
                             shift=int(rng.integers(0, n_bundles)))
            f = interleave_bundles(c)
            assert sorted(f) == list(range(c.num_bundles))
            regs = []
            for cce in range(c.num_cces):
                regs.extend(cce_to_regs(c, cce))
            assert sorted(regs) == list(range(c.num_regs))
        c54 = make_coreset(num_groups=9, duration=2, bundle_size=2, rows=2, shift=0)
        f = interleave_bundles(c54)
        assert all(f[j] == 27 * (j % 2) + j // 2 for j in range(54))


def cand(cces, ss, coreset=1, level=None, m=0):
    level = level if level is not None else len(cces)
    return PdcchCandidate(ss, coreset, level, m, tuple(cces), 0, 0)


def test_criterion_4_overbooking_rules():
    with criterion(4, "css never dropped; uss drops form an index suffix; worked css-plus-uss drop"):
        rng = np.random.default_rng(1004)
        for _ in range(150):
            demands = []
            for i in range(int(rng.integers(0, 2))):
                demands.append(SetDemand(i, True, (cand(range(0, 8), i),)))
            uss_idx = sorted(rng.choice(range(10, 30), size=int(rng.integers(0, 6)),
                                        replace=False).tolist())
            for k, idx in enumerate(uss_idx):
                n = int(rng.integers(1, 5))
                demands.append(SetDemand(int(idx), False,
                                         tuple(cand(range(4 * j, 4 * j + 4), int(idx),
                                                    coreset=2 + k, level=4, m=j)
                                               for j in range(n))))
            limits = (int(rng.integers(6, 18)), int(rng.integers(12, 40)))
            report = allocate_slot(demands, limits)
            css_set = {d.ss_index for d in demands if d.is_css}
            assert css_set <= set(report.mapped_ss)
            assert not css_set & set(report.dropped_ss)
            mapped_uss = [i for i in report.mapped_ss if i not in css_set]
            assert mapped_uss == uss_idx[:len(mapped_uss)]
            assert list(report.dropped_ss) == uss_idx[len(mapped_uss):]
            assert report.candidates_used <= limits[0]
            assert report.cces_used <= limits[1]
        # worked case: css holds 24 CCEs constant; the first uss set crossing 56 drops
        css = SetDemand(0, True, tuple(cand(range(8 * i, 8 * i + 8), 0, level=8, m=i)
                                       for i in range(3)))
        uss2 = SetDemand(2, False, tuple(cand(range(24 + 4 * i, 28 + 4 * i), 2, coreset=2,
                                              level=4, m=i) for i in range(5)))
        uss3 = SetDemand(3, False, tuple(cand(range(44 + 8 * i, 52 + 8 * i), 3, coreset=3,
                                              level=8, m=i) for i in range(2)))
        report = allocate_slot([css, uss2, uss3], (44, 56))
        assert report.mapped_ss == (0, 2) and report.dropped_ss == (3,)


def test_criterion_5_ca_formulas():
    with criterion(5, "CA limits equal big-integer formula on 500-case grid"):
        rng = np.random.default_rng(1005)
        checked = 0
        while checked < 500:
            cells = tuple(int(x) for x in rng.integers(0, 9, 4))
            if sum(cells) == 0:
                continue
            cap = UeCapability(int(rng.integers(4, 17)))
            mu = int(rng.integers(0, 4))
            m_max, c_max = non_ca_limits(mu)
            expected = (floor(Fraction(cap.n_cells_cap * m_max * cells[mu], sum(cells))),
                        floor(Fraction(cap.n_cells_cap * c_max * cells[mu], sum(cells))))
            got = ca_limits(cap, CellGroupCa(cells), mu)
            assert got == expected
            assert overbooking_limits(cap, CellGroupCa(cells), mu) == \
                (min(expected[0], m_max), min(expected[1], c_max))
            checked += 1


def test_criterion_6_codec_round_trip():
    with criterion(6, "1000 round trips; 0 wrong-rnti accepts in 1e5 trials; length law"):
        rng = np.random.default_rng(1006)
        for _ in range(1000):
            level = int(rng.choice([1, 2, 4, 8, 16]))
            size = int(rng.integers(12, min(140, level * 108 - 24) + 1))
            payload = tuple(int(b) for b in rng.integers(0, 2, size))
            rnti = int(rng.integers(1, 1 << 16))
            init = int(rng.integers(0, 1 << 31))
            msg = DciMessage("0_1", payload, rnti)
            coded = encode_candidate(msg, level, None, init)
            assert coded.symbols.size == 54 * level  # 108*L coded bits
            assert blind_decode(coded.symbols, [("0_1", size)], rnti, None, init) == msg

        # wrong-rnti Monte Carlo: same candidate attacked with 1e5 wrong rntis
        payload = tuple(int(b) for b in rng.integers(0, 2, 39))
        tx_rnti = 0x4601
        coded = encode_candidate(DciMessage("1_0", payload, tx_rnti), 1, None, 7)
        accepts = 0
        for _ in range(100_000):
            wrong = int(rng.integers(1, 1 << 16))
            if wrong == tx_rnti:
                continue
            if blind_decode(coded.symbols, [("1_0", 39)], wrong, None, 7) is not None:
                accepts += 1
        assert accepts == 0


def test_criterion_7_size_budget():
    with criterion(7, "3+1 checker and alignment fixups"):
        c_only = {f: ("c",) for f in ("0_0", "0_1", "1_0", "1_1")}
        assert check_size_budget({"1_0": 39, "0_0": 39, "1_1": 55, "0_1": 62}, c_only).ok
        assert not check_size_budget({"1_0": 39, "0_0": 41, "1_1": 55, "0_1": 62}, c_only).ok
        assert check_size_budget({"2_0": 44}).ok
        assert align_sizes({"0_0": 39, "1_0": 41}) == {"0_0": 41, "1_0": 41}
        fixed = {"0_0": 41, "1_0": 41, "1_1": 55, "2_0": 44}
        assert align_sizes(fixed) == fixed
        assert align_sizes({"0_0": 39, "1_0": 41, "0_1": 50, "1_1": 60, "2_2": 44}) == \
            {"0_0": 41, "1_0": 41, "0_1": 60, "1_1": 60, "2_2": 44}
        rng = np.random.default_rng(1007)
        formats = list(DCI_FORMATS)
        for _ in range(200):
            chosen = [f for f in formats if rng.integers(0, 2)]
            if not chosen:
                continue
            sizes = {f: int(rng.integers(20, 70)) for f in chosen}
            try:
                aligned = align_sizes(sizes)
            except SizeAlignmentError as err:
                assert not check_size_budget(err.residual_sizes).ok
                continue
            assert check_size_budget(aligned).ok


def test_criterion_8_beam_rules():
    with criterion(8, "collision rule exhaustive; BFR path normal->prach->recovered"):
        def oracle(occasions):
            css = [(min(i for i, t in o.ss_entries if t == "css"), o.coreset_index)
                   for o in occasions if any(t == "css" for _, t in o.ss_entries)]
            if css:
                return (min(css)[1],)
            uss = [(min(i for i, t in o.ss_entries if t == "uss"), o.coreset_index)
                   for o in occasions if any(t == "uss" for _, t in o.ss_entries)]
            return (min(uss)[1],)

        for n in (2, 3):
            for types in itertools.product(("css", "uss"), repeat=n):
                for perm in itertools.permutations(range(6), n):
                    occasions = [OverlappingOccasion(20 + k, ((perm[k], types[k]),), f"rs{k}")
                                 for k in range(n)]
                    assert resolve_collision(occasions) == oracle(occasions)

        cfg = BfrConfig(("csi_a", "csi_b"), ("b1", "b2", "b3"), -5.0, 7)
        state = BfrState.initial()
        assert state.phase == "normal"
        state, actions = bfr_step(state, cfg, {"csi_a": -10, "csi_b": -12,
                                               "b1": -3, "b2": -2, "b3": -1}, "measure")
        assert state.phase == "prach_sent" and actions == ["send_prach:b3"]
        assert state.q_new in cfg.q1
        state, _ = bfr_step(state, cfg, None, "response_received")
        assert state.phase == "recovered" and state.q_new in cfg.q1


def test_criterion_9_simulator_determinism_and_capacity():
    with criterion(9, "seeded runs identical; AL-8 contention blocks >= 8/10; 1024-slot clean run"):
        cell_c = make_cell(coresets=[make_coreset()],
                           search_spaces=[make_ss(index=2, candidates={8: 2}, formats=("1_1",))],
                           dci_sizes={"1_1": 55})
        ues = tuple(UeConfig(rnti=0x600 + i) for i in range(10))
        traffic = tuple(TrafficItem(0, 0x600 + i, "1_1", None, 8) for i in range(10))
        contention = Scenario(cell=cell_c, ues=ues, traffic=traffic, horizon=1, seed=2)
        stats = run(contention)
        assert stats["totals"]["blocked"] >= 8

        cell_u = make_cell(coresets=[make_coreset()],
                           search_spaces=[make_ss(index=2, candidates={1: 4, 2: 2, 4: 1},
                                                  formats=("1_1",))],
                           dci_sizes={"1_1": 55})
        uncontended = Scenario(cell=cell_u, ues=(UeConfig(rnti=0x4601),),
                               patterns=(TrafficPattern(1, 0, 0x4601, "1_1", None, 4),),
                               horizon=1024, seed=3)
        a = stats_to_json(run(uncontended))
        b = stats_to_json(run(uncontended))
        assert a == b
        stats = json.loads(a)
        assert stats["totals"]["scheduled"] == 1024
        assert stats["totals"]["decoded"] == 1024
        assert stats["totals"]["blocked"] == 0
