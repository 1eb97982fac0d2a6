"""CLI subcommands: exit codes and output formats."""

import csv
import io
import json


import pytest
import yaml

from nrpdcch.cli import main
from nrpdcch.dci_codec import DEFAULT_SUITE, DciMessage, encode_candidate, qpsk_demodulate


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_lint_clean_config(example_cell_path, capsys):
    code, out, err = run_cli(capsys, "lint", example_cell_path, "--horizon", "4", "--mu", "1")
    assert code == 0
    assert err == ""
    lines = [json.loads(line) for line in out.strip().splitlines()]
    assert len(lines) == 4
    assert lines[0]["slot"] == 0
    assert lines[0]["mapped_ss"] == [0, 2]
    assert lines[0]["limits"] == [36, 56]


def test_lint_flags_violations(tmp_path, capsys, example_cell_path):
    with open(example_cell_path) as fh:
        data = yaml.safe_load(fh)
    data["coresets"][0]["interleaver_rows"] = 4  # 54 bundles not divisible
    bad = tmp_path / "bad.yaml"
    bad.write_text(yaml.safe_dump(data))
    code, out, err = run_cli(capsys, "lint", str(bad))
    assert code == 1
    assert "coreset_bundle_count_divisible" in err


def test_lint_size_budget_violation(tmp_path, capsys, example_cell_path):
    with open(example_cell_path) as fh:
        data = yaml.safe_load(fh)
    data["dci_sizes"] = {"0_0": 39, "1_0": 41, "0_1": 50, "1_1": 60}
    bad = tmp_path / "sizes.yaml"
    bad.write_text(yaml.safe_dump(data))
    code, out, err = run_cli(capsys, "lint", str(bad))
    assert code == 1
    assert "dci_size_budget" in err


def test_dump_mapping_csv(example_cell_path, capsys):
    code, out, err = run_cli(capsys, "dump-mapping", example_cell_path, "--coreset", "1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 18 * 6 * 12  # cce x reg x re
    kinds = {r["kind"] for r in rows}
    assert kinds == {"payload", "dmrs"}
    first = rows[0]
    assert [first["cce"], first["reg"], first["prb"], first["symbol"]] == ["0", "0", "0", "0"]
    # partition: every REG appears exactly once (12 REs each)
    regs = sorted({int(r["reg"]) for r in rows})
    assert regs == list(range(108))


def test_candidates_csv(example_cell_path, capsys):
    code, out, err = run_cli(capsys, "candidates", example_cell_path,
                             "--rnti", "0x4601", "--slots", "0..1")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    # slot 0: css (2x AL4 + 1x AL8) + uss (7) = 10; slot 1: uss only = 7
    assert len(rows) == 17
    assert {r["slot"] for r in rows} == {"0", "1"}


def test_simulate_json_and_seed_override(example_scenario_path, capsys):
    code, out, err = run_cli(capsys, "simulate", example_scenario_path)
    assert code == 0
    stats = json.loads(out)
    assert stats["totals"]["decoded"] == 64
    code2, out2, _ = run_cli(capsys, "simulate", example_scenario_path, "--seed", "123")
    assert json.loads(out2)["seed"] == 123


def test_vectors_pass_and_fail(tmp_path, capsys):
    payload = (1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0)  # 12 bits = 3 hex digits
    msg = DciMessage("1_0", payload, 0x4601)
    coded = encode_candidate(msg, 1, DEFAULT_SUITE, 42)
    coded_bits = qpsk_demodulate(coded.symbols)
    hexstr = "".join(format(int(b3) << 3 | int(b2) << 2 | int(b1) << 1 | int(b0), "x")
                     for b3, b2, b1, b0 in coded_bits.reshape(-1, 4))
    good = tmp_path / "vectors.txt"
    good.write_text("# payload_hex,rnti,L,scramble_init,expected_coded_hex\n"
                    f"b2e,0x4601,1,42,{hexstr}\n")
    code, out, err = run_cli(capsys, "vectors", str(good))
    assert code == 0
    assert "1/1 vectors passed" in out

    bad = tmp_path / "bad_vectors.txt"
    bad.write_text(f"b2e,0x4601,1,43,{hexstr}\n")  # wrong scramble init
    code, out, err = run_cli(capsys, "vectors", str(bad))
    assert code == 1
    assert "FAIL" in out


def test_lint_secondary_cell_rejects_overbooking(tmp_path, capsys):
    data = {
        "phys_cell_id": 1,
        "bwps": [{"index": 0, "num_prbs": 106, "mu": 0}],
        "coresets": [{"index": 1, "bwp": 0, "freq_groups": list(range(9)),
                      "duration_symbols": 2, "mapping": "interleaved",
                      "bundle_size": 2, "interleaver_rows": 2}],
        "search_spaces": [
            {"index": 2, "type": "uss", "coreset": 1, "candidates": {1: 30}},
            {"index": 3, "type": "uss", "coreset": 1, "candidates": {1: 30}},
        ],
    }
    cfg = tmp_path / "overbooked.yaml"
    cfg.write_text(yaml.safe_dump(data))
    code, out, err = run_cli(capsys, "lint", str(cfg), "--horizon", "2")
    assert code == 0  # primary cell: overbooking is legal, sets are dropped
    assert json.loads(out.splitlines()[0])["dropped_ss"] == [3]
    code, out, err = run_cli(capsys, "lint", str(cfg), "--horizon", "2", "--secondary")
    assert code == 1
    assert "secondary_cell_overbooked" in err


def test_missing_file_is_error_not_traceback(capsys):
    code, out, err = run_cli(capsys, "lint", "no_such_file.yaml")
    assert code == 1
    assert "error" in err


def test_usage_error_exit_code(example_cell_path):
    with pytest.raises(SystemExit) as exc:
        main(["candidates", example_cell_path])  # missing required --rnti/--slots
    assert exc.value.code == 2
