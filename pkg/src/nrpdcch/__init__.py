"""Desk-scale, bit-exact model of the 5G NR downlink control channel."""

from .core_model import (
    BandwidthPart,
    CellConfig,
    Coreset0Placement,
    CoresetConfig,
    Numerology,
    Violation,
    coreset_geometry,
    slot_duration_ms,
    validate_cell,
)
from .dci_codec import (
    DCI_FORMATS,
    DEFAULT_SUITE,
    CodecSuite,
    CodedPdcch,
    DciMessage,
    align_sizes,
    blind_decode,
    check_size_budget,
    encode_candidate,
)
from .monitoring_budget import (
    CellGroupCa,
    SlotBudgetReport,
    UeCapability,
    allocate_slot,
    ca_limits,
    count_cces_for_estimation,
    non_ca_limits,
    overbooking_limits,
)
from .resource_mapping import (
    ReLocation,
    candidate_payload_res,
    cce_to_regs,
    dmrs_regs,
    interleave_bundles,
)
from .search_space import (
    PdcchCandidate,
    SearchSpaceSet,
    candidate_cces,
    enumerate_candidates,
    is_monitored_slot,
    occasions_in_slot,
    y_value,
)

__version__ = "0.1.0"

__all__ = [
    "BandwidthPart", "CellConfig", "Coreset0Placement", "CoresetConfig", "Numerology",
    "Violation", "coreset_geometry", "slot_duration_ms", "validate_cell",
    "DCI_FORMATS", "DEFAULT_SUITE", "CodecSuite", "CodedPdcch", "DciMessage",
    "align_sizes", "blind_decode", "check_size_budget", "encode_candidate",
    "CellGroupCa", "SlotBudgetReport", "UeCapability", "allocate_slot", "ca_limits",
    "count_cces_for_estimation", "non_ca_limits", "overbooking_limits",
    "ReLocation", "candidate_payload_res", "cce_to_regs", "dmrs_regs", "interleave_bundles",
    "PdcchCandidate", "SearchSpaceSet", "candidate_cces", "enumerate_candidates",
    "is_monitored_slot", "occasions_in_slot", "y_value",
]
