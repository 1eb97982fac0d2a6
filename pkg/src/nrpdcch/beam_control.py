"""TCI/QCL bookkeeping, the beam-collision monitoring rule, and the
beam-failure-recovery state machine over abstract quality measurements.

Quality is a bare scalar (higher is better); the measurement chain that
would produce it is out of scope.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class TciState:
    id: int
    qcl_type_a_rs: str
    qcl_type_d_rs: Optional[str] = None


@dataclass(frozen=True)
class CoresetBeamState:
    coreset_index: int
    configured_tci_ids: tuple[int, ...] = ()
    active_tci: Optional[int] = None
    default_ssb: str = "ssb0"


def effective_qcl(state: CoresetBeamState, tci_pool: Mapping[int, TciState]) -> tuple[str, Optional[str]]:
    """(TypeA reference, TypeD reference) the UE assumes for the CORESET.

    Without an activated TCI state the UE falls back to the SSB beam from
    initial access for both QCL types.
    """
    if state.active_tci is None:
        return state.default_ssb, state.default_ssb
    if state.active_tci not in state.configured_tci_ids:
        raise ConfigurationError(
            f"active TCI {state.active_tci} is not among the configured ids")
    tci = tci_pool.get(state.active_tci)
    if tci is None:
        raise ConfigurationError(f"TCI {state.active_tci} missing from the cell pool")
    return tci.qcl_type_a_rs, tci.qcl_type_d_rs


@dataclass(frozen=True)
class OverlappingOccasion:
    """One CORESET's contribution to a set of time-overlapping occasions."""

    coreset_index: int
    ss_entries: tuple[tuple[int, str], ...]  # (ss index, "css"/"uss")
    type_d_rs: Optional[str]


def resolve_collision(occasions) -> tuple[int, ...]:
    """CORESETs actually monitored when occasions overlap in time.

    A single receive beam forces a choice whenever two or more distinct
    TypeD references collide: the CORESET carrying the globally lowest
    css index wins, else the one with the lowest uss index. Occasions
    sharing one TypeD reference (or none) are all monitored.
    """
    occasions = list(occasions)
    if not occasions:
        return ()
    distinct_rs = {o.type_d_rs for o in occasions}
    if len(distinct_rs) <= 1:
        return tuple(sorted(o.coreset_index for o in occasions))

    def lowest(ss_type: str, occ: OverlappingOccasion) -> Optional[int]:
        indices = [i for i, t in occ.ss_entries if t == ss_type]
        return min(indices) if indices else None

    best = None
    for occ in occasions:
        css = lowest("css", occ)
        uss = lowest("uss", occ)
        # rank: css sets strictly before uss sets, then by index
        key = (0, css) if css is not None else (1, uss if uss is not None else 1 << 30)
        if best is None or key < best[0]:
            best = (key, occ.coreset_index)
    return (best[1],)


@dataclass(frozen=True)
class BfrConfig:
    q0: tuple[str, ...]  # failure-detection reference signals
    q1: tuple[str, ...]  # candidate beams for recovery
    threshold: float
    ss_bfr: int


PHASE_NORMAL = "normal"
PHASE_FAILURE = "failure_detected"
PHASE_PRACH_SENT = "prach_sent"
PHASE_RECOVERED = "recovered"

EVENT_MEASURE = "measure"
EVENT_RESPONSE = "response_received"
EVENT_RESET = "reset"


@dataclass(frozen=True)
class BfrState:
    phase: str = PHASE_NORMAL
    q_new: Optional[str] = None

    @classmethod
    def initial(cls) -> "BfrState":
        return cls()


def _select_q_new(cfg: BfrConfig, measurements: Mapping[str, float]) -> str:
    candidates = [rs for rs in cfg.q1 if rs in measurements]
    if not candidates:
        raise DomainError("no candidate-set measurements available to select q_new")
    # argmax quality; equal qualities resolve to the lowest rs id
    return min(candidates, key=lambda rs: (-measurements[rs], rs))


def bfr_step(state: BfrState, cfg: BfrConfig,
             measurements: Optional[Mapping[str, float]], event: str) -> tuple[BfrState, list[str]]:
    """Advance the recovery machine one event; returns (state, actions).

    Failure is declared only when every detection-set quality is below
    the threshold; the step then immediately selects the best candidate
    beam and emits send_prach, landing in prach_sent. A response on the
    recovery search space completes the procedure; reset is the only way
    back to normal from recovered.
    """
    if event == EVENT_RESET:
        return BfrState.initial(), []
    if event == EVENT_RESPONSE:
        if state.phase == PHASE_PRACH_SENT:
            return BfrState(PHASE_RECOVERED, state.q_new), ["qcl_update:" + str(state.q_new)]
        return state, []
    if event != EVENT_MEASURE:
        raise DomainError(f"unknown BFR event {event!r}")

    if measurements is None or any(rs not in measurements for rs in cfg.q0):
        missing = [] if measurements is None else [rs for rs in cfg.q0 if rs not in measurements]
        raise DomainError(f"measure event must cover all of q0 (missing {missing or list(cfg.q0)})")
    if state.phase != PHASE_NORMAL:
        return state, []
    if all(measurements[rs] < cfg.threshold for rs in cfg.q0):
        q_new = _select_q_new(cfg, measurements)
        return BfrState(PHASE_PRACH_SENT, q_new), [f"send_prach:{q_new}"]
    return state, []


def bfr_monitoring_qcl(state: BfrState) -> Optional[str]:
    """QCL reference for the recovery search space while recovering."""
    if state.phase in (PHASE_PRACH_SENT, PHASE_RECOVERED):
        return state.q_new
    return None
