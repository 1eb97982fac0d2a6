"""YAML loading for cell configurations and simulation scenarios.

The exact schema is documented in docs/config_format.md; loaders accept
either a path or an already-parsed mapping so scenarios can embed a cell
inline or point at a separate file.
"""

from __future__ import annotations

import os
from typing import Any, Mapping, Optional, Union

import yaml

from .beam_control import BfrConfig
from .core_model import (
    BandwidthPart,
    CellConfig,
    Coreset0Placement,
    CoresetConfig,
    Numerology,
)
from .errors import ConfigurationError
from .monitoring_budget import CellGroupCa, UeCapability
from .search_space import SearchSpaceSet
from .simulator import Scenario, TrafficItem, TrafficPattern, UeBfrScript, UeConfig

PathOrDict = Union[str, os.PathLike, Mapping[str, Any]]


def _load_yaml(source: PathOrDict) -> dict:
    if isinstance(source, Mapping):
        return dict(source)
    with open(source, "r", encoding="utf-8") as fh:
        data = yaml.safe_load(fh)
    if not isinstance(data, dict):
        raise ConfigurationError(f"{source}: top level must be a mapping")
    return data


def _freq_mask(entry: Mapping[str, Any]) -> int:
    if "freq_resource" in entry:
        return int(entry["freq_resource"])
    groups = entry.get("freq_groups", [])
    mask = 0
    for g in groups:
        mask |= 1 << int(g)
    return mask


def _symbol_mask(value) -> int:
    """Accept a list of start symbols or a 14-character '01' string."""
    if isinstance(value, str):
        if len(value) != 14 or set(value) - {"0", "1"}:
            raise ConfigurationError(f"symbol bitmap string must be 14 chars of 0/1: {value!r}")
        return sum(1 << i for i, ch in enumerate(value) if ch == "1")
    if isinstance(value, int):
        return value
    return sum(1 << int(s) for s in value)


def _coreset_from(entry: Mapping[str, Any]) -> CoresetConfig:
    coreset0 = None
    if "coreset0" in entry:
        c0 = entry["coreset0"]
        coreset0 = Coreset0Placement(int(c0["offset_prb"]), int(c0["num_prbs"]))
    return CoresetConfig(
        index=int(entry["index"]),
        bwp_index=int(entry.get("bwp", 0)),
        freq_resource=_freq_mask(entry),
        duration_symbols=int(entry.get("duration_symbols", 1)),
        mapping=str(entry.get("mapping", "non_interleaved")),
        bundle_size=int(entry.get("bundle_size", 6)),
        interleaver_rows=int(entry.get("interleaver_rows", 2)),
        shift=int(entry.get("shift", 0)),
        precoder_granularity=str(entry.get("precoder_granularity", "narrowband")),
        tci_state_ids=tuple(entry.get("tci_state_ids", ())),
        dmrs_scrambling_id=int(entry.get("dmrs_scrambling_id", 0)),
        coreset0=coreset0,
    )


def _search_space_from(entry: Mapping[str, Any]) -> SearchSpaceSet:
    candidates = {int(k): int(v) for k, v in dict(entry.get("candidates", {})).items()}
    return SearchSpaceSet(
        index=int(entry["index"]),
        ss_type=str(entry.get("type", "uss")),
        coreset_index=int(entry["coreset"]),
        periodicity=int(entry.get("periodicity", 1)),
        offset=int(entry.get("offset", 0)),
        duration=int(entry.get("duration", 1)),
        symbol_bitmap=_symbol_mask(entry.get("symbols", [0])),
        candidates=candidates,
        monitored_formats=tuple(str(f) for f in entry.get("formats", ())),
    )


def cell_from_dict(data: Mapping[str, Any]) -> CellConfig:
    bwps = tuple(
        BandwidthPart(
            index=int(b["index"]),
            start_prb=int(b.get("start_prb", 0)),
            num_prbs=int(b["num_prbs"]),
            numerology=Numerology(int(b.get("mu", 0))),
        )
        for b in data.get("bwps", ())
    )
    return CellConfig(
        phys_cell_id=int(data.get("phys_cell_id", 0)),
        point_a=int(data.get("point_a", 0)),
        ssb_start_prb=int(data.get("ssb_start_prb", 0)),
        bwps=bwps,
        coresets=tuple(_coreset_from(c) for c in data.get("coresets", ())),
        search_spaces=tuple(_search_space_from(s) for s in data.get("search_spaces", ())),
        dci_sizes={str(k): int(v) for k, v in dict(data.get("dci_sizes", {})).items()},
    )


def load_cell(source: PathOrDict) -> CellConfig:
    return cell_from_dict(_load_yaml(source))


def _bfr_from(entry: Mapping[str, Any]) -> UeBfrScript:
    cfg = BfrConfig(
        q0=tuple(str(r) for r in entry["q0"]),
        q1=tuple(str(r) for r in entry["q1"]),
        threshold=float(entry["threshold"]),
        ss_bfr=int(entry["ss_bfr"]),
    )
    measurements = {
        int(m["slot"]): {str(k): float(v) for k, v in m["values"].items()}
        for m in entry.get("measurements", ())
    }
    return UeBfrScript(cfg, measurements, int(entry.get("response_delay", 1)))


def _ue_from(entry: Mapping[str, Any]) -> UeConfig:
    scrambling = entry.get("scrambling", "cell")
    if isinstance(scrambling, str):
        mode, scrambling_id = scrambling, 0
    else:
        mode = str(scrambling.get("mode", "cell"))
        scrambling_id = int(scrambling.get("id", 0))
    if mode not in ("cell", "ue"):
        raise ConfigurationError(f"scrambling mode must be 'cell' or 'ue', got {mode!r}")
    return UeConfig(
        rnti=int(entry["rnti"]),
        capability=UeCapability(int(entry.get("n_cells_cap", 4))),
        ss_indices=tuple(int(s) for s in entry["ss_sets"]) if "ss_sets" in entry else None,
        scramble_mode=mode,
        scrambling_id=scrambling_id,
        bfr=_bfr_from(entry["bfr"]) if "bfr" in entry else None,
    )


def scenario_from_dict(data: Mapping[str, Any],
                       base_dir: Optional[str] = None) -> Scenario:
    cell_entry = data.get("cell")
    if isinstance(cell_entry, str):
        path = cell_entry if base_dir is None else os.path.join(base_dir, cell_entry)
        cell = load_cell(path)
    elif isinstance(cell_entry, Mapping):
        cell = cell_from_dict(cell_entry)
    else:
        raise ConfigurationError("scenario needs a 'cell' mapping or file path")

    traffic = tuple(
        TrafficItem(
            slot=int(t["slot"]),
            rnti=int(t["rnti"]),
            format_id=str(t["format"]),
            payload_bits=int(t["bits"]) if "bits" in t else None,
            preferred_level=int(t.get("al", 4)),
        )
        for t in data.get("traffic", ())
    )
    patterns = tuple(
        TrafficPattern(
            period=int(p.get("period", 1)),
            offset=int(p.get("offset", 0)),
            rnti=int(p["rnti"]),
            format_id=str(p["format"]),
            payload_bits=int(p["bits"]) if "bits" in p else None,
            preferred_level=int(p.get("al", 4)),
        )
        for p in data.get("patterns", ())
    )
    ca = None
    if "ca" in data:
        cells = [int(x) for x in data["ca"]]
        if len(cells) != 4:
            raise ConfigurationError("ca must list serving-cell counts for mu=0..3")
        ca = CellGroupCa(tuple(cells))
    return Scenario(
        cell=cell,
        ues=tuple(_ue_from(u) for u in data.get("ues", ())),
        traffic=traffic,
        patterns=patterns,
        horizon=int(data.get("horizon", 1)),
        seed=int(data.get("seed", 0)),
        bit_flip_prob=float(data.get("bit_flip_prob", 0.0)),
        ca=ca,
    )


def load_scenario(source: PathOrDict) -> Scenario:
    base_dir = None
    if not isinstance(source, Mapping):
        base_dir = os.path.dirname(os.path.abspath(source))
    return scenario_from_dict(_load_yaml(source), base_dir)
