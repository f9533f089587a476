import json
import subprocess
import sys

import pytest

from artifact.cli import main

from conftest import data


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_and_normalize(capsys):
    assert run(capsys, "parse", "a . b + c")[:2] == (0, "a . b + c\n")
    code, out, _ = run(capsys, "normalize", "(a+b).c")
    assert code == 0 and out.strip() == "a . c + b . c"


def test_trace_lines(capsys):
    _, out, _ = run(capsys, "normalize", "--trace", "(a+b).c")
    assert out.splitlines()[0] == "RA4 @ ε : (a + b) . c ==> a . c + b . c"


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "parse", "a +")
    assert code == 2 and "error" in err


def test_lts_dot(capsys, tmp_path):
    dot = tmp_path / "x.dot"
    code, out, _ = run(capsys, "lts", "a||b", "--dot", str(dot))
    assert code == 0 and "s0 -{a,b}-> s1" in out
    text = dot.read_text()
    assert "doublecircle" in text and 'label="{a,b}"' in text


@pytest.mark.parametrize("rel,lhs,rhs,code", [
    ("step", "a+a", "a", 0),
    ("step", "a||b", "a.b+b.a", 1),
    ("rbstep", "a.tau", "a", 0),
    ("rbstep", "tau.a", "a", 1),
    ("pomset", "a.b", "a.b", 0),
    ("hp", "a.(b+c)", "a.b+a.c", 1),
])
def test_equiv_exit_codes(capsys, rel, lhs, rhs, code):
    assert run(capsys, "equiv", "--relation", rel, lhs, rhs)[0] == code


def test_equiv_prints_witness(capsys):
    _, out, _ = run(capsys, "equiv", "--relation", "step", "a||b", "a.b+b.a")
    assert "{a,b}" in out


@pytest.mark.xfail(strict=True, reason="chapter-3 lock-step SOS gives a & b no single-action steps (see ledger)")
def test_equiv_milner_expansion_example(capsys):
    code, _, _ = run(capsys, "equiv", "--relation", "step", "a&b", "a.b+b.a+a||b+a|b",
                     "--sig", data("gamma_sig.json"))
    assert code == 0


def test_pes_commands(capsys):
    code, out, _ = run(capsys, "pes", "shapes", data("h_shape.json"))
    assert code == 0 and "H-shape" in out
    code, out, _ = run(capsys, "pes", "structurize", data("v_shape.json"))
    assert code == 0 and out.strip() == "a . b + a || c"
    code, out, _ = run(capsys, "pes", "structurize", data("n_shape.json"), "--sig", data("n_sig.json"))
    assert out.strip() == "c . g . b"


def test_kleene_and_cka(capsys):
    assert run(capsys, "kleene", "equiv", "--mode", "lang", "a.(b+c)", "a.b+a.c")[0] == 0
    assert run(capsys, "kleene", "equiv", "--mode", "mil", "a.(b+c)", "a.b+a.c")[0] == 1
    code, out, _ = run(capsys, "cka", "lang", "a^", "--bound", "2")
    assert code == 0 and out.splitlines() == ["1", "a", "a || a"]
    assert run(capsys, "cka", "check", "--axiom", "A12", "--inst", "x=a")[0] == 0


@pytest.mark.parametrize("suite", ["batc", "mil", "guards"])
def test_audit_exit_zero(capsys, suite):
    code, out, _ = run(capsys, "audit", suite, "--samples", "30", "--seed", "7")
    assert code == 0 and out.rstrip().endswith("PASS")


def test_audit_mil_reports_control(capsys):
    _, out, _ = run(capsys, "audit", "mil", "--samples", "10")
    assert "control" in out


def test_json_reports_are_deterministic(capsys):
    argv = ["audit", "batc", "--samples", "10", "--seed", "3", "--json"]
    a = run(capsys, *argv)[1]
    b = run(capsys, *argv)[1]
    assert a == b
    rep = json.loads(a)
    assert rep["seed"] == 3 and rep["command"] == "audit"


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "artifact", "normalize", "a + 0"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.strip() == "a"
