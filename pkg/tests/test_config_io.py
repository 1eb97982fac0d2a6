"""YAML loading of cells and scenarios."""

import pytest

from nrpdcch.config_io import cell_from_dict, load_cell, load_scenario, scenario_from_dict
from nrpdcch.core_model import validate_cell
from nrpdcch.errors import ConfigurationError


def test_example_cell_loads_clean(example_cell_path):
    cell = load_cell(example_cell_path)
    assert cell.phys_cell_id == 42
    assert validate_cell(cell) == []
    coreset = cell.coreset(1)
    assert coreset.num_prbs == 54
    assert coreset.num_cces == 18
    ss = cell.search_space(2)
    assert ss.candidates_for(1) == 4
    assert cell.dci_sizes["1_1"] == 55


def test_example_scenario_loads(example_scenario_path):
    sc = load_scenario(example_scenario_path)
    assert sc.horizon == 64
    assert sc.ues[0].rnti == 0x4601
    assert sc.patterns[0].format_id == "1_1"
    assert sc.cell.phys_cell_id == 42


def test_freq_mask_forms_agree():
    by_groups = cell_from_dict({
        "phys_cell_id": 1,
        "bwps": [{"index": 0, "num_prbs": 106, "mu": 1}],
        "coresets": [{"index": 1, "bwp": 0, "freq_groups": [0, 2, 3],
                      "duration_symbols": 1, "bundle_size": 6}],
    })
    by_mask = cell_from_dict({
        "phys_cell_id": 1,
        "bwps": [{"index": 0, "num_prbs": 106, "mu": 1}],
        "coresets": [{"index": 1, "bwp": 0, "freq_resource": 0b1101,
                      "duration_symbols": 1, "bundle_size": 6}],
    })
    assert by_groups.coreset(1).freq_resource == by_mask.coreset(1).freq_resource == 0b1101


def test_symbol_bitmap_string_form():
    cell = cell_from_dict({
        "phys_cell_id": 1,
        "bwps": [{"index": 0, "num_prbs": 106, "mu": 1}],
        "coresets": [{"index": 1, "bwp": 0, "freq_groups": [0], "duration_symbols": 1,
                      "bundle_size": 6}],
        "search_spaces": [{"index": 0, "type": "css", "coreset": 1,
                           "symbols": "10000010000000", "candidates": {1: 1}}],
    })
    assert cell.search_space(0).start_symbols() == (0, 6)


def test_coreset0_section():
    cell = cell_from_dict({
        "phys_cell_id": 1,
        "ssb_start_prb": 30,
        "bwps": [{"index": 0, "num_prbs": 106, "mu": 1}],
        "coresets": [{"index": 0, "bwp": 0, "duration_symbols": 2,
                      "coreset0": {"offset_prb": -2, "num_prbs": 48},
                      "mapping": "non_interleaved", "bundle_size": 6}],
    })
    c0 = cell.coreset(0)
    assert c0.is_coreset0
    assert c0.prb_positions(cell.ssb_start_prb)[0] == 28
    assert validate_cell(cell) == []


def test_scenario_inline_cell_and_bad_scrambling():
    inline = {
        "cell": {"phys_cell_id": 3, "bwps": [{"index": 0, "num_prbs": 52, "mu": 0}]},
        "ues": [{"rnti": 100, "scrambling": {"mode": "ue", "id": 9}}],
        "horizon": 2,
    }
    sc = scenario_from_dict(inline)
    assert sc.ues[0].scramble_mode == "ue"
    assert sc.ues[0].scrambling_id == 9
    bad = {**inline, "ues": [{"rnti": 100, "scrambling": {"mode": "bogus"}}]}
    with pytest.raises(ConfigurationError):
        scenario_from_dict(bad)


def test_scenario_ca_requires_four_counts():
    base = {"cell": {"phys_cell_id": 3, "bwps": [{"index": 0, "num_prbs": 52, "mu": 0}]},
            "ca": [1, 2]}
    with pytest.raises(ConfigurationError):
        scenario_from_dict(base)


def test_bfr_script_parses():
    sc = scenario_from_dict({
        "cell": {"phys_cell_id": 3,
                 "bwps": [{"index": 0, "num_prbs": 52, "mu": 0}],
                 "coresets": [{"index": 1, "bwp": 0, "freq_groups": [0],
                               "duration_symbols": 1, "bundle_size": 6}],
                 "search_spaces": [{"index": 7, "type": "uss", "coreset": 1,
                                    "candidates": {1: 1}}]},
        "ues": [{"rnti": 5, "bfr": {
            "q0": ["csi_a"], "q1": ["b1", "b2"], "threshold": -4, "ss_bfr": 7,
            "measurements": [{"slot": 3, "values": {"csi_a": -9, "b1": 0, "b2": 1}}],
            "response_delay": 2}}],
        "horizon": 8,
    })
    script = sc.ues[0].bfr
    assert script.config.q0 == ("csi_a",)
    assert script.measurements[3]["b2"] == 1.0
    assert script.response_delay == 2
