import json
import subprocess
import sys
from pathlib import Path

import pytest

import dyntri
from dyntri.cli import main, parse_duration

FIX = Path(dyntri.__file__).parent / "fixtures"

CYCLIC = ("FRAMES P=1 C=1 E=1\nVAR A frame=0 card=2\nVAR B frame=1 card=2\nVAR A frame=1 card=2\n"
          "VAR A frame=3 card=2\nEDGE A:0 -> B:1\nEDGE B:1 -> A:0\n")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def fx(name):
    return FIX / f"{name}.tmpl"


def test_parse_duration():
    assert parse_duration("500ms") == 0.5
    assert parse_duration("2m") == 120
    assert parse_duration("3") == 3
    with pytest.raises(Exception):
        parse_duration("soon")


def test_check_exit_codes(capsys, tmp_path):
    assert run(capsys, "check", fx("chain"))[0] == 0
    bad = tmp_path / "cyclic.tmpl"
    bad.write_text(CYCLIC)
    code, out, _ = run(capsys, "check", bad)
    assert code == 1 and "cycle" in out
    assert run(capsys, "check", tmp_path / "missing.tmpl")[0] == 2


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["boundary", str(fx("chain")), "--M", "0"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_boundary_report_hourglass(capsys):
    code, out, _ = run(capsys, "boundary", fx("hourglass"), "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["initial_interface_size"] == {"left": 2, "right": 2}
    assert rep["results"]["left"]["quality"] == 1
    assert rep["results"]["right"]["quality"] == 1
    assert rep["parity"] is True


def test_boundary_report_chain(capsys):
    _, out, _ = run(capsys, "boundary", fx("chain"), "--direction", "left", "--json")
    r = json.loads(out)["results"]["left"]
    assert (r["initial_quality"], r["quality"]) == (1, 1)


def test_text_output(capsys):
    code, out, _ = run(capsys, "boundary", fx("hourglass"))
    assert code == 0 and "parity: yes" in out


def test_triangulate_chain(capsys):
    code, out, _ = run(capsys, "triangulate", fx("chain"), "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["triangulation"]["maxclique"] == 2
    assert all(rep["triangulation"]["assembled"]["verification"].values())


def test_triangulate_basic_vs_boundary(capsys):
    weights = {}
    for flag in ([], ["--basic-interface"]):
        _, out, _ = run(capsys, "triangulate", fx("hourglass"), "--j", "global-weight", "--json", *flag)
        weights[bool(flag)] = json.loads(out)["triangulation"]["virtual_log_weight"]
    assert weights[False] <= weights[True]


def test_triangulate_inadmissible_k(capsys):
    code, _, err = run(capsys, "triangulate", fx("chain"), "--M", "2", "--S", "2", "--k", "3")
    assert code == 1 and "admissible" in err


def test_reports_are_byte_identical(capsys):
    outs = {run(capsys, "triangulate", fx("xy"), "--json")[1] for _ in range(2)}
    assert len(outs) == 1


def test_budget_variants(capsys):
    scores = []
    for budget in ("100ms", "1s"):
        _, out, _ = run(capsys, "score", fx("multichunk"), "--budget", budget, "--json")
        scores.append(json.loads(out)["maxclique"])
    assert scores[1] <= scores[0]


def test_partition_and_unroll(capsys, tmp_path):
    code, out, _ = run(capsys, "partition", fx("hourglass"), "--json")
    assert code == 0 and json.loads(out)["left_interface"] == ["E@4"]
    dot = tmp_path / "g.dot"
    code, out, _ = run(capsys, "unroll", fx("chain"), "--k", "3", "--json", "--dot", dot)
    assert code == 0 and len(json.loads(out)["nodes"]) == 5
    assert dot.read_text().startswith("digraph")
    code, out, _ = run(capsys, "moralize", fx("chain"), "--json")
    assert code == 0


def test_randgen_round_trip(capsys, tmp_path):
    out_file = tmp_path / "r.tmpl"
    assert run(capsys, "randgen", "--nodes", "5", "--seed", "3", "-o", out_file)[0] == 0
    assert run(capsys, "check", out_file)[0] == 0


def test_bench_zero_trials(capsys):
    code, out, _ = run(capsys, "bench", "--trials", "0")
    assert code == 0
    assert out.strip().split(",")[0] == "seed" and len(out.strip().splitlines()) == 1


def test_bench_determinism_and_dominance(capsys):
    args = ("bench", "--trials", "3", "--nodes", "5", "--seed", "7", "--json")
    first = run(capsys, *args)[1]
    assert run(capsys, *args)[1] == first
    assert run(capsys, *args, "--threads", "2")[1] == first
    for row in json.loads(first)["rows"]:
        assert row["boundary_weight"] <= row["basic_weight"]


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "dyntri", "check", str(fx("ladder"))],
                         capture_output=True, text=True)
    assert res.returncode == 0
