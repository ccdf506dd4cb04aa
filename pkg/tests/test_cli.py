import subprocess
import sys

import pytest

from slrhammer.cli import main
from slrhammer.datalog import parse_datalog

from conftest import CORPUS, RUNNING_CLAUSES

PHI3 = RUNNING_CLAUSES + "conjecture forall x. (0 <= x, x <= 1 || Q(x)).\n"
PHI4 = RUNNING_CLAUSES + "conjecture forall x. (0 <= x, x <= 2 || Q(x)).\n"


@pytest.fixture
def write(tmp_path):
    def _write(text, name="p.slr"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return _write


def test_decide_entailed(write, capsys):
    assert main(["decide", write(PHI3)]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "ENTAILED"


def test_decide_not_entailed_prints_model(write, capsys):
    assert main(["decide", write(PHI4)]) == 1
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "NOT ENTAILED"
    assert "Q = {a_{[0,1],1}}" in out


def test_decide_stats_columns(write, capsys):
    main(["decide", write(PHI3), "--stats", "--quiet"])
    out = capsys.readouterr().out
    for key in ("|B|: 4", "t-time:", "h-time:", "r-time:", "tfacts:"):
        assert key in out


def test_decide_trace_logs_rounds(write, capsys):
    main(["decide", write(PHI3), "--trace"])
    assert capsys.readouterr().err.strip()


def test_satisfiability_mode(write, capsys):
    assert main(["decide", write(RUNNING_CLAUSES)]) == 1
    assert capsys.readouterr().out.startswith("SATISFIABLE")
    assert main(["decide", write("fact P(0).\nclause P(x) -> false.\n")]) == 0
    assert capsys.readouterr().out.startswith("UNSATISFIABLE")


def test_hammer_datalog_output_parses(write, capsys):
    assert main(["hammer", write(PHI3), "--out", "datalog"]) == 0
    text = capsys.readouterr().out
    assert "@query goal ." in text
    prog = parse_datalog(text)
    assert prog.rules


def test_hammer_clauses_output(write, capsys):
    assert main(["hammer", write(PHI3), "--out", "clauses"]) == 0
    assert "false" in capsys.readouterr().out


def test_ground_smt_output(write, capsys):
    assert main(["ground", write(PHI4), "--out", "smt"]) == 0
    out = capsys.readouterr().out
    assert "(declare-const a1_1 Real) ; a_{[0,1],1}" in out
    assert "(check-sat)" in out


def test_oracle_agrees(write, capsys):
    assert main(["oracle", write(PHI3), "--stats"]) == 0
    assert "oracle: horn" in capsys.readouterr().out
    assert main(["oracle", write(PHI4)]) == 1


def test_gen_is_deterministic(capsys):
    main(["gen", "--seed", "17"])
    first = capsys.readouterr().out
    main(["gen", "--seed", "17"])
    assert capsys.readouterr().out == first


@pytest.mark.parametrize("argv", [[], ["decide"], ["frobnicate", "x"], ["hammer", "x", "--out", "tptp"]])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 3


def test_missing_file_is_usage_error(tmp_path, capsys):
    assert main(["decide", str(tmp_path / "absent.slr")]) == 3


def test_parse_error_exit(write, capsys):
    assert main(["decide", write("clause x <= || P(x).")]) == 4
    assert "1:13" in capsys.readouterr().err


def test_unsupported_exit(write, capsys):
    non_horn = "clause x <= 1 || P(x), Q(x).\nconjecture forall x. P(x).\n"
    assert main(["hammer", write(non_horn)]) == 5
    assert "NotHorn" in capsys.readouterr().err
    assert main(["decide", write("clause x + y <= 1 || P(x, y).")]) == 5


def test_oracle_atom_limit(write, monkeypatch, capsys):
    monkeypatch.setenv("SLR_HAMMER_MAX_ATOMS", "2")
    text = (CORPUS / "extended-phi2" / "problem.slr").read_text()
    assert main(["oracle", write(text)]) == 5


def test_console_script_module():
    proc = subprocess.run([sys.executable, "-m", "slrhammer.cli", "decide",
                           str(CORPUS / "extended-phi3" / "problem.slr")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("ENTAILED")
