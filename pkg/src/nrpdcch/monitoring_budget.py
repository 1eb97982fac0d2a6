"""Per-slot blind-decode and channel-estimation budgets, overbooking, CA limits.

Overbooking resolution follows three rules: common sets map first, UE
specific sets map in ascending index order, and once a set would push
either count past its limit, that set and every later one stay unmapped
for the slot.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core_model import CellConfig
from .errors import ConfigurationError, UnsupportedNumerology
from .search_space import PdcchCandidate

# Per-slot caps for SCS mu = 0..3: blind-decoded candidates and CCEs
# needing channel estimates.
M_MAX_PER_MU = (44, 36, 22, 20)
C_MAX_PER_MU = (56, 56, 48, 32)


@dataclass(frozen=True)
class UeCapability:
    """Reported carrier-aggregation monitoring capability (at least 4 cells)."""

    n_cells_cap: int = 4

    M_MAX = M_MAX_PER_MU
    C_MAX = C_MAX_PER_MU


@dataclass(frozen=True)
class CellGroupCa:
    """Configured downlink serving cells per numerology mu = 0..3."""

    cells_per_mu: tuple[int, int, int, int]

    @property
    def total_cells(self) -> int:
        return sum(self.cells_per_mu)


@dataclass(frozen=True)
class SlotBudgetReport:
    mapped_ss: tuple[int, ...]
    dropped_ss: tuple[int, ...]
    candidates_used: int
    cces_used: int


def non_ca_limits(mu: int) -> tuple[int, int]:
    """(max blind-decode candidates, max channel-estimation CCEs) per slot."""
    if not 0 <= mu <= 3:
        raise UnsupportedNumerology(f"monitoring limits are defined for mu 0..3, got {mu}")
    return M_MAX_PER_MU[mu], C_MAX_PER_MU[mu]


def ca_limits(cap: UeCapability, ca: CellGroupCa, mu: int) -> tuple[int, int]:
    """CA-limit totals for the group of cells at numerology mu.

    M_total = floor(cap * M_max_mu * N_mu / sum_j N_j), likewise for CCEs.
    Callers apply non-CA limits per cell instead whenever the configured
    cell count is within the reported capability; this query always
    answers the formula.
    """
    m_max, c_max = non_ca_limits(mu)
    total = ca.total_cells
    if total < 1:
        raise ConfigurationError("at least one serving cell must be configured")
    n_mu = ca.cells_per_mu[mu]
    m_total = cap.n_cells_cap * m_max * n_mu // total
    c_total = cap.n_cells_cap * c_max * n_mu // total
    return m_total, c_total


def overbooking_limits(cap: UeCapability, ca: CellGroupCa, mu: int) -> tuple[int, int]:
    """Primary-cell limits: minimum of the CA-limit and the non-CA limit."""
    m_total, c_total = ca_limits(cap, ca, mu)
    m_max, c_max = non_ca_limits(mu)
    return min(m_total, m_max), min(c_total, c_max)


def estimation_cce_keys(candidates) -> set[tuple[int, int, int]]:
    """Distinct (coreset, occasion start symbol, cce) triples.

    Overlapping candidates in the same CORESET and occasion share one
    channel estimate per CCE and therefore count once.
    """
    keys = set()
    for cand in candidates:
        for cce in cand.cces:
            keys.add((cand.coreset_index, cand.start_symbol, cce))
    return keys


def count_cces_for_estimation(candidates) -> int:
    return len(estimation_cce_keys(candidates))


@dataclass(frozen=True)
class SetDemand:
    ss_index: int
    is_css: bool
    candidates: tuple[PdcchCandidate, ...]


def build_demands(cell: CellConfig, candidates) -> list[SetDemand]:
    """Group one slot's candidates by SS set, ascending index."""
    by_set: dict[int, list[PdcchCandidate]] = {}
    for cand in candidates:
        by_set.setdefault(cand.ss_index, []).append(cand)
    demands = []
    for index in sorted(by_set):
        demands.append(SetDemand(index, cell.search_space(index).is_css, tuple(by_set[index])))
    return demands


def allocate_slot(demands, limits: tuple[int, int]) -> SlotBudgetReport:
    """Map SS sets for one slot against (candidate, CCE) limits.

    Common sets must fit outright; overbooking legality applies to UE
    specific sets only. CCE counting is incremental: a set only pays for
    estimation triples not already covered by earlier-mapped sets.
    """
    cand_limit, cce_limit = limits
    mapped: list[int] = []
    dropped: list[int] = []
    used_keys: set[tuple[int, int, int]] = set()
    n_candidates = 0

    css = sorted((d for d in demands if d.is_css), key=lambda d: d.ss_index)
    uss = sorted((d for d in demands if not d.is_css), key=lambda d: d.ss_index)

    for d in css:
        n_candidates += len(d.candidates)
        used_keys |= estimation_cce_keys(d.candidates)
        mapped.append(d.ss_index)
    if n_candidates > cand_limit or len(used_keys) > cce_limit:
        raise ConfigurationError(
            f"common SS sets alone need {n_candidates} candidates / {len(used_keys)} CCEs, "
            f"exceeding limits {limits}; overbooking is only legal for UE-specific sets")

    stopped = False
    for d in uss:
        if stopped:
            dropped.append(d.ss_index)
            continue
        new_keys = estimation_cce_keys(d.candidates) - used_keys
        if n_candidates + len(d.candidates) > cand_limit or len(used_keys) + len(new_keys) > cce_limit:
            stopped = True
            dropped.append(d.ss_index)
            continue
        n_candidates += len(d.candidates)
        used_keys |= new_keys
        mapped.append(d.ss_index)

    return SlotBudgetReport(tuple(mapped), tuple(dropped), n_candidates, len(used_keys))


def secondary_cell_violation(report: SlotBudgetReport) -> bool:
    """Secondary cells may not overbook: any dropped set is a violation."""
    return bool(report.dropped_ss)


def share_group_budget(cap: UeCapability, ca: CellGroupCa, mu: int,
                       demands: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Split the mu-group CA budget over cells, greedy in cell-index order.

    demands holds one (candidates, cces) pair per cell of the group; each
    cell is additionally capped at its non-CA limit. Returns the granted
    (candidates, cces) per cell.
    """
    m_total, c_total = ca_limits(cap, ca, mu)
    m_max, c_max = non_ca_limits(mu)
    grants = []
    for want_m, want_c in demands:
        got_m = min(want_m, m_max, m_total)
        got_c = min(want_c, c_max, c_total)
        m_total -= got_m
        c_total -= got_c
        grants.append((got_m, got_c))
    return grants
