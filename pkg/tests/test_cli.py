import csv
import io
import json
import subprocess
import sys

import jsonschema
import pytest

from wienerzp import schemas
from wienerzp.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    assert code == 0, text
    payload = json.loads(text)
    assert payload["schema"] == "v1"
    schema = schemas.BY_COMMAND.get(payload["command"])
    if schema:
        jsonschema.validate(payload, schema)
    return payload


def test_norm():
    rep = run_json("norm", "-p", "3", "--set", "0,1")
    assert rep["norm"] == pytest.approx(4 / 3)
    assert run_json("norm", "-p", "5", "--set", "0")["norm"] == pytest.approx(1)


def test_norm_from_file_with_spectrum(tmp_path):
    f = tmp_path / "pts.txt"
    f.write_text("# three points\n0\n1\n3\n")
    rep = run_json("norm", "-p", "7", "--set-file", str(f), "--spectrum", "--method", "direct")
    assert rep["set_size"] == 3
    assert len(rep["spectrum"]) == 7


def test_energy():
    assert run_json("energy", "-p", "5", "--set", "0,1", "-k", "2")["t_k"] == "6"
    assert run_json("energy", "-p", "5", "--set", "3", "-k", "3")["t_k"] == "1"
    rep = run_json("energy", "--domain", "z", "--set", "0,1,2", "-k", "2", "--profile")
    assert rep["t_k"] == "19" and rep["domain"] == "integers"
    assert rep["profile"] == [[0, "1"], [1, "2"], [2, "3"], [3, "2"], [4, "1"]]


def test_verify_suites():
    rep = run_json("verify", "scattered", "--trials", "20", "--seed", "1")
    assert rep["ok"] and rep["trials"] == 20
    rep = run_json("verify", "parseval", "-p", "1009", "--trials", "5")
    assert rep["ok"] and rep["seed"] == 0


def test_verify_unknown_suite_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nosuch"])
    assert exc.value.code == 2


def test_verify_reports_violation(monkeypatch):
    from wienerzp import verify

    def broken(trials=1, seed=0):
        res = verify.SuiteResult("broken")
        res.record(False, {"why": "forced"})
        return res

    monkeypatch.setitem(verify.SUITES, "young", broken)
    code, text = run("verify", "young")
    assert code == 1
    assert json.loads(text)["failed"] == 1


def test_trace_output_is_deterministic():
    args = ("trace", "-p", "1009", "--set=-3,-2,-1,0,1,2,3,23,47,95,191",
            "--eps", "1.5", "-C", "0.5", "--k-override", "2")
    a, b = run_json(*args), run_json(*args)
    assert a == b and a["branch"] == "scattered"
    assert run_json("trace", "-p", "1009", "--set", "0")["branch"] == "degenerate"
    human = run("trace", "-p", "1009", "--set", "0", "--format", "human")[1]
    assert "branch: degenerate" in human


def test_trace_byte_identical_across_processes():
    cmd = [sys.executable, "-m", "wienerzp", "trace", "-p", "10007", "--set",
           ",".join(map(str, range(40)))]
    first = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    assert first == second
    assert json.loads(first)["branch"] == "sparse_shell"


def test_search_csv_and_json():
    code, text = run("search", "-p", "13", "-n", "1,3", "--strategy", "exhaustive")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["n"] for r in rows] == ["1", "3"]
    assert float(rows[0]["best_norm"]) == pytest.approx(1)
    rep = run_json("search", "-p", "13", "-n", "3", "--strategy", "local_search",
                   "--seed", "42", "--budget", "2000", "--format", "json")
    assert rep["results"][0]["evaluations"] == 2000


@pytest.mark.parametrize("argv", [
    ["search", "-p", "13", "-n", "13"],
    ["search", "-p", "13", "-n", "3", "--strategy", "local_search"],
    ["norm", "-p", "4", "--set", "0"],
    ["norm", "-p", "7"],
    ["norm", "-p", "7", "--set", "0", "--set-file", "x"],
    ["norm", "-p", "7", "--set-file", "/nonexistent/pts.txt"],
    ["energy", "-p", "7", "--set", "0", "-k", "0"],
    ["trace", "-p", "31", "--set", "0", "--eps", "-1"],
    ["dilate", "-p", "11", "--generators", "3", "--targets", "6"],
    ["gap", "-p", "11", "--gap", "0; 1; 0"],
    ["vdp-check", "-p", "13", "-n", "5"],
])
def test_validation_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["norm", "-p", "seven", "--set", "0"])
    assert exc.value.code == 2


def test_dilate_gap_localize():
    assert run_json("dilate", "-p", "11", "--generators", "3", "--targets", "1")["q"] == 4
    none = run_json("dilate", "-p", "13", "--generators", "1,2", "--targets", "1,1")
    assert none["found"] is False
    gap = run_json("gap", "-p", "101", "--gap", "0; 1,10; 3,2")
    assert gap["members"] == [0, 1, 2, 10, 11, 12] and gap["proper"]
    loc = run_json("localize", "-p", "31", "--set", "0,5,10", "-m", "2")
    assert loc["q"] == 6 and loc["captured"] == 3


def test_vdp_check_and_quad():
    rep = run_json("vdp-check", "-p", "101")
    assert rep["all_hold"] and len(rep["orders"]) == 25
    q = run_json("quad", "--freqs", "0,1", "--coeffs", "1,1")
    assert q["value"] == pytest.approx(1.2732395447, abs=1e-7)
    q = run_json("quad", "--freqs", "0,1,2")
    assert 1.4 <= q["value"] <= 1.5


def test_profile_csv():
    code, text = run("profile", "-p", "3", "--lengths", "1,2")
    rows = list(csv.DictReader(io.StringIO(text)))
    assert code == 0 and rows[1]["in_range"] == "0"
    assert float(rows[1]["norm"]) == pytest.approx(4 / 3)


def test_json_has_no_nan():
    code, text = run("search", "-p", "13", "-n", "1", "--format", "json")
    assert "NaN" not in text
    json.loads(text)


def test_report_writes_tables_and_figures(tmp_path):
    rep = run_json("report", "--outdir", str(tmp_path), "-p", "211", "--search-p", "11",
                   "--search-max-n", "3", "--vdp-p", "31", "--seed", "1")
    for name in rep["files"]:
        assert (tmp_path / name).stat().st_size > 0
    assert {"ap_profile.png", "search.png", "vdp_norms.png"} <= set(rep["files"])
