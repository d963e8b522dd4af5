import csv
import io
import json

import numpy as np

from cqsim import io as cio
from cqsim.cli import cell_rng, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_empty_sweep_writes_header_only(capsys):
    code, out, _ = run(capsys, "cr-curve", "--values")
    assert code == 0
    assert out.splitlines() == ["abscissa,ordinate,constraint_slack,certificate_gap"]


def test_same_seed_same_bytes(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["hsw", "--n", "2", "3", "--seeds", "4", "--seed", "7"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b), "--threads", "2"]) == 0
    for name in ("hsw.csv", "hsw.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_different_seed_changes_output(capsys):
    _, first, _ = run(capsys, "lemma", "dilution", "--n", "4", "--m-exp", "3", "--trials", "5", "--seed", "1")
    _, second, _ = run(capsys, "lemma", "dilution", "--n", "4", "--m-exp", "3", "--trials", "5", "--seed", "2")
    assert first != second


def test_resume_completes_truncated_sweep(tmp_path):
    full, part = tmp_path / "full", tmp_path / "part"
    args = ["redistribute", "--random", "12", "--seed", "3"]
    assert main(args + ["--out", str(full)]) == 0
    assert main(args + ["--out", str(part)]) == 0
    text = (part / "redistribute.csv").read_text()
    lines = text.splitlines(keepends=True)
    # keep five complete rows and half of the sixth
    (part / "redistribute.csv").write_text("".join(lines[:6]) + lines[6][:10])
    assert main(args + ["--out", str(part), "--resume"]) == 0
    assert (part / "redistribute.csv").read_bytes() == (full / "redistribute.csv").read_bytes()
    assert (part / "redistribute.json").read_bytes() == (full / "redistribute.json").read_bytes()


def test_resume_needs_output_directory(capsys):
    code, _, err = run(capsys, "redistribute", "--random", "2", "--resume")
    assert code == 2 and "error" in err


def test_invalid_json_reports_location(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text('{\n  "prior": [0.5, 0.5],\n  oops\n}\n')
    code, _, err = run(capsys, "hsw", "--config", str(cfg))
    assert code == 2
    assert "bad.json:3" in err


def test_invalid_ensemble_exit_code(tmp_path, capsys):
    cfg = tmp_path / "e.json"
    states = [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]], [[[0, 0], [0, 0]], [[0, 0], [1, 0]]]]
    cfg.write_text(json.dumps({"ensemble": {"prior": [0.7, 0.7], "states": states}}))
    code, _, _ = run(capsys, "hsw", "--config", str(cfg))
    assert code == 2


def test_guard_exit_code(capsys):
    code, _, err = run(capsys, "hsw", "--n", "20", "--seeds", "1")
    assert code == 3 and "guard" in err


def test_infeasible_exit_code(tmp_path, capsys):
    cfg = tmp_path / "wz.json"
    cfg.write_text(json.dumps({"joint_xz": [[0.4, 0.1], [0.1, 0.4]],
                               "distortion": [[0.1, 1.0], [1.0, 0.1]]}))
    code, out, _ = run(capsys, "wyner-ziv", "--config", str(cfg), "--values", "0.05", "0.5",
                       "--budget", "300", "--starts", "1")
    assert code == 4
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][-1] == "feasible"
    assert [r[-1] for r in rows[1:]] == ["false", "true"]


def test_reference_simulate_sweep_row_count(tmp_path):
    out = tmp_path / "sim"
    assert main(["simulate", "--trials", "10", "--out", str(out), "--threads", "2"]) == 0
    rows = read_rows(out / "simulate.csv")
    assert len(rows) == 1 + 3 * 20
    assert [int(r[0]) for r in rows[1:]] == [n for n in (2, 4, 6) for _ in range(20)]
    summary = json.loads((out / "simulate.json").read_text())
    assert summary["rows"] == 60
    assert set(summary["mean_classical_error"]) == {"2", "4", "6"}
    assert 0.0 <= summary["decreasing_fraction"] <= 1.0


def test_config_params_and_flag_priority(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"params": {"n": [2], "seeds": 3}}))
    _, out, _ = run(capsys, "hsw", "--config", str(cfg))
    assert len(out.splitlines()) == 1 + 3
    _, out, _ = run(capsys, "hsw", "--config", str(cfg), "--seeds", "2")
    assert len(out.splitlines()) == 1 + 2


def test_typicality_subcommand(capsys):
    code, out, _ = run(capsys, "typicality", "--n", "6", "--delta", "0.2")
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert len(rows) == 3
    assert all(r[rows[0].index("pass")] == "true" for r in rows[1:])


def test_redistribute_single_state(tmp_path, capsys):
    cfg = tmp_path / "bell.json"
    amp = [[0, 0], [0, 0], [0, 0], [0, 0]]
    amp[0] = amp[3] = [2 ** -0.5, 0]
    cfg.write_text(json.dumps({"state": {"dims": [1, 1, 2, 2], "amplitudes": amp}}))
    code, out, _ = run(capsys, "redistribute", "--config", str(cfg))
    assert code == 0
    doc = json.loads(out)
    assert doc["q_min"] == 0.0 and doc["qe_sum_min"] == -1.0
    assert doc["fqsw_tight"] is True


def test_cell_rng_is_independent_of_order():
    a = cell_rng(5, 3).random(4)
    cell_rng(5, 0).random(10)
    np.testing.assert_array_equal(a, cell_rng(5, 3).random(4))
    assert not np.array_equal(a, cell_rng(5, 4).random(4))


def test_round_sig_and_format():
    assert cio.round_sig(-0.0) == 0.0
    assert cio.format_value(cio.round_sig(0.1 + 0.2)) == "0.3"
    assert cio.format_value(True) == "true"
    assert cio.format_value(None) == ""


def test_complex_pairs_round_trip(rng):
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    np.testing.assert_array_equal(cio.complex_from_pairs(cio.complex_to_pairs(m)), m)
