import subprocess
import sys

import pytest

from hornfix.cli import main
from hornfix.gen import AGAP_TEXT, TC_LFP_TEXT
from hornfix.parser import format_structure, parse_program, parse_structure

from conftest import AGAP_GRAPH_TEXT


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {
        "agap.dl": AGAP_TEXT,
        "graph.st": AGAP_GRAPH_TEXT,
        "f.shr": "exists R/1 forall x (S(x) -> R(x) ; R(x) -> false)\n",
        "s1.st": "structure { size 1 rel S/1 { (0) } }\n",
        "tc.lfp": TC_LFP_TEXT,
        "cycle.st": "structure { size 3 rel E/2 { (0,1) (1,2) (2,0) } }\n",
        "base.st": "structure { size 2 rel R/2 { (0,1) } }\n",
        "bad.dl": "P(x :- E(x).\n",
        "tree.dl": "const root.\nT(x,y) :- E(x,y).\nT(x,y) :- E(x,z), T(z,y).\nG() :- T(root,x), S(x).\ngoal G.\n",
        "sbase.st": "structure { size 2 rel S/1 { (1) } }\n",
    }.items():
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    return paths


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_agap(capsys, files):
    code, out, _ = run(capsys, "eval", "--logic", "datalogr", files["agap.dl"], files["graph.st"], "--goal", "P")
    assert (code, out) == (0, "true\n")


def test_eval_trace(capsys, files):
    code, out, _ = run(capsys, "eval", files["agap.dl"], files["graph.st"], "--trace")
    lines = out.splitlines()
    assert lines[0].startswith("stage 0: ") and lines[-2] == "stages: 6" and lines[-1] == "true"


def test_eval_false_exit_code(capsys, files):
    code, out, _ = run(capsys, "eval", "--logic", "horn", files["f.shr"], files["s1.st"])
    assert (code, out) == (1, "false\n")


def test_eval_lfp(capsys, files):
    assert run(capsys, "eval", "--logic", "lfp", files["tc.lfp"], files["cycle.st"])[:2] == (0, "true\n")


def test_translate_horn_then_eval(capsys, files, tmp_path):
    code, out, _ = run(capsys, "translate", "--from", "horn", "--to", "datalogr", files["f.shr"])
    assert code == 0
    target = tmp_path / "f.dl"
    target.write_text(out)
    code, verdict, _ = run(capsys, "eval", str(target), files["s1.st"])
    assert (code, verdict) == (0, "true\n")


def test_translate_other_directions(capsys, files):
    code, out, _ = run(capsys, "translate", "--from", "datalogr", "--to", "horn", files["agap.dl"])
    assert code == 0 and out.startswith("exists Palt/2 Q/3 forall")
    code, out, _ = run(capsys, "translate", "--from", "lfp", "--to", "datalogr", files["tc.lfp"])
    assert code == 0 and len(parse_program(out).rules) == 5
    code, out, _ = run(capsys, "translate", "--from", "datalogr", "--to", "simlfp", files["agap.dl"])
    assert code == 0 and out.splitlines()[-1] == "goal P"
    code, _, err = run(capsys, "translate", "--from", "lfp", "--to", "horn", files["tc.lfp"])
    assert code == 2 and "no translation" in err


def test_check(capsys):
    assert run(capsys, "check", "1", "2", "1")[:2] == (0, "reject\n")
    assert run(capsys, "check", "3", "1", "3")[:2] == (0, "accept\n")
    assert run(capsys, "check", "1", "2")[0] == 2


def test_encode_decode_sigma(capsys, files, tmp_path):
    code, out, _ = run(capsys, "encode", files["base.st"])
    assert code == 0
    tree = tmp_path / "tree.st"
    tree.write_text(out)
    assert parse_structure(out).size == 3
    code, out, _ = run(capsys, "decode", str(tree))
    assert parse_structure(out) == parse_structure(open(files["base.st"]).read())
    code1, a, _ = run(capsys, "sigma", "--m", "2", str(tree))
    code2, b, _ = run(capsys, "sigma", "--m", "2", "--method", "decide", str(tree))
    code3, c, _ = run(capsys, "sigma", "--m", "2", "--base", files["base.st"])
    assert code1 == code2 == code3 == 0 and a == b == c


def test_pistar_and_verify(capsys, files):
    code, out, _ = run(capsys, "pistar", files["tree.dl"])
    assert code == 0 and "goal G*." in out
    code, out, _ = run(capsys, "verify-prop6", files["tree.dl"], files["sbase.st"])
    assert code == 0 and out.splitlines()[-1] == "ok"


def test_kprime(capsys, files, tmp_path):
    from hornfix.kprime import condition1_graph
    from hornfix.structure import make_structure
    g = tmp_path / "g.st"
    g.write_text(format_structure(condition1_graph(make_structure(2, {}))))
    code, out, _ = run(capsys, "kprime", "--oracle", "even", str(g))
    assert code == 0 and out.startswith("member (condition 1)")
    code, out, _ = run(capsys, "kprime", "--oracle", "never", "--c", "1", str(g))
    assert code == 0 and out.startswith("not a member")


def test_diagnostics_exit_2(capsys, files):
    code, out, err = run(capsys, "eval", files["bad.dl"], files["graph.st"])
    assert code == 2 and out == "" and "SyntaxError" in err and "1:5" in err
    code, _, err = run(capsys, "eval", files["agap.dl"], "/nonexistent.st")
    assert code == 2 and "cannot read" in err


def test_budget_env(files):
    env = {"HORNFIX_BUDGET": "1", "PATH": ""}
    proc = subprocess.run([sys.executable, "-m", "hornfix.cli", "eval", "--logic", "horn",
                           files["f.shr"], files["s1.st"]], capture_output=True, text=True, env=env)
    assert proc.returncode == 2 and "budget" in proc.stderr


def test_deterministic_output(capsys, files):
    first = run(capsys, "translate", "--from", "datalogr", "--to", "horn", files["agap.dl"])
    second = run(capsys, "translate", "--from", "datalogr", "--to", "horn", files["agap.dl"])
    assert first == second
