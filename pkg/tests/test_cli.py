import csv
import io
import json

import pytest

from qpentagon.checks import CriterionResult
from qpentagon.cli import EXIT_NONCONVERGENCE, EXIT_USAGE, _exit_code, main, parse_args


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_malformed_flag_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as err:
        main(["phi", "--eval", "z=abc", "--hbar", "1"])
    assert err.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as err:
        main(["phi", "--eval", "z=0", "--hbar", "one"])
    assert err.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as err:
        main(["pentagon", "--grid", "4096by40"])
    assert err.value.code == EXIT_USAGE


def test_unknown_suite_is_a_usage_error(capsys):
    code, _ = run(capsys, "report", "--suites", "phi,nonsense")
    assert code == EXIT_USAGE


def test_phi_eval(capsys):
    code, out = run(capsys, "phi", "--eval", "z=0", "--hbar", "1")
    assert code == 0
    row = json.loads(out)["values"][0]
    assert abs(row["abs"] - 1) < 1e-10


def test_cluster_range_eight(capsys):
    code, out = run(capsys, "cluster", "--range", "8")
    assert code == 0
    payload = json.loads(out)
    assert payload["all_pass"] and {r["criterion_id"] for r in payload["results"]} == {9}
    assert all(set(r) >= {"suite", "criterion_id", "measured", "threshold", "pass"} for r in payload["results"])
    assert all("runtime_ms" not in r for r in payload["results"])


def test_timings_flag_adds_runtime(capsys):
    code, out = run(capsys, "qtorus", "--range", "2", "--symmetrization-range", "1", "--timings")
    assert code == 0
    assert all("runtime_ms" in r for r in json.loads(out)["results"])


def test_dump_formats(capsys):
    code, out = run(capsys, "cluster", "--dump=1,0", "--format", "md")
    assert code == 0 and out == "1 0 : [(0, -1, 1), (1, -1, 1), (1, 0, 1)]\n"
    code, out = run(capsys, "qtorus", "--dump=-1,1")
    assert code == 0 and json.loads(out)[0]["point"] == [-1, 1]


def test_csv_and_markdown_reports(capsys):
    code, out = run(capsys, "qtorus", "--range", "2", "--symmetrization-range", "1", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and all(r["criterion_id"] == "10" for r in rows)
    json.loads(rows[0]["measured"])
    code, out = run(capsys, "qtorus", "--range", "2", "--symmetrization-range", "1", "--format", "md")
    assert out.startswith("| id | suite |") and "PASS" in out


def test_config_file_and_flag_override(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("# small sweep\nrange = 3\ngamma_range = 4\nseed = 5\ntimings = false\n")
    args = parse_args(["cluster", "--config", str(conf)])
    assert (args.range, args.gamma_range, args.seed, args.timings) == (3, 4, 5, False)
    args = parse_args(["cluster", "--config", str(conf), "--range", "2"])
    assert args.range == 2 and args.gamma_range == 4


def test_bad_config_file(tmp_path):
    conf = tmp_path / "bad.conf"
    conf.write_text("range\n")
    with pytest.raises(SystemExit) as err:
        parse_args(["cluster", "--config", str(conf)])
    assert err.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as err:
        parse_args(["cluster", "--config", str(tmp_path / "missing.conf")])
    assert err.value.code == EXIT_USAGE


def test_output_directory(tmp_path, capsys):
    code, out = run(capsys, "moduli", "--out", str(tmp_path), "--format", "csv")
    assert code == 0 and out == ""
    assert (tmp_path / "moduli.csv").read_text().startswith("suite,criterion_id")


def test_nonconvergence_exit_code(capsys):
    # a five-unit window cannot hold the Hermite samples
    code, _ = run(capsys, "pentagon", "--grid", "256x5", "--no-refine")
    assert code == EXIT_NONCONVERGENCE


def test_phi_suite_covers_first_five_criteria(capsys):
    code, out = run(capsys, "phi")
    assert code == 0
    payload = json.loads(out)
    assert {r["criterion_id"] for r in payload["results"]} == {1, 2, 3, 4, 5}


def test_exit_code_is_lowest_failing_criterion():
    def rec(cid, ok):
        return CriterionResult("s", cid, "n", {}, 0.0, ok)

    assert _exit_code([rec(9, True), rec(11, True)]) == 0
    assert _exit_code([rec(11, False), rec(7, False), rec(3, True)]) == 7


def test_json_is_deterministic(capsys):
    argv = ["moduli", "--seed", "11"]
    _, first = run(capsys, *argv)
    _, second = run(capsys, *argv)
    assert first == second
