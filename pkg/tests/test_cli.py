import subprocess
import sys

import pytest

from ctagen.cli import main
from ctagen.fileformat import parse_automaton

from helpers import PROBLEMS


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_example6(tmp_path, capsys):
    out = tmp_path / "a.cta"
    code, text, _ = run(capsys, "build", PROBLEMS / "example6.ctp", "-o", out)
    assert code == 0
    assert "states: 4  final: 1  rules: 13" in text
    A = parse_automaton(out.read_text())
    assert len(A.states) == 4 and len(A.rules) == 13


def test_build_prune_example6(tmp_path, capsys):
    code, text, _ = run(capsys, "build", "--prune", PROBLEMS / "example6.ctp", "-o", tmp_path / "a.cta")
    assert code == 0 and "rules: 11" in text


def test_build_empty_terms(tmp_path, capsys):
    code, text, _ = run(capsys, "build", PROBLEMS / "empty.ctp", "-o", tmp_path / "a.cta")
    assert code == 0 and "final: 0" in text


def test_build_no_trim_keeps_states(tmp_path, capsys):
    code, text, _ = run(capsys, "build", "--no-trim", PROBLEMS / "example6.ctp", "-o", tmp_path / "a.cta")
    assert code == 0 and "states: 4" in text


def test_build_output_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.cta", tmp_path / "b.cta"
    run(capsys, "build", PROBLEMS / "example2.ctp", "-o", a)
    run(capsys, "build", PROBLEMS / "example2.ctp", "-o", b)
    assert a.read_bytes() == b.read_bytes()


def test_build_error_leaves_no_output(tmp_path, capsys):
    bad = tmp_path / "bad.ctp"
    bad.write_text("structure nat\nfun f : 1\nterm f(x, y)\n")
    out = tmp_path / "out.cta"
    code, _, err = run(capsys, "build", bad, "-o", out)
    assert code == 2 and "error" in err
    assert not out.exists()
    assert list(tmp_path.iterdir()) == [bad]


def test_build_error_keeps_existing_output(tmp_path, capsys):
    bad = tmp_path / "bad.ctp"
    bad.write_text("fun f : 1\n")
    out = tmp_path / "out.cta"
    out.write_text("untouched")
    assert run(capsys, "build", bad, "-o", out)[0] == 2
    assert out.read_text() == "untouched"


@pytest.mark.parametrize(
    "automaton, term, code",
    [("a_int.cta", "f(s(0), s(0))", 0), ("a_int.cta", "f(0, s(0))", 1), ("a_int_prime.cta", "f(0, s(0))", 0)],
)
def test_accept(capsys, automaton, term, code):
    got, text, _ = run(capsys, "accept", PROBLEMS / automaton, term)
    assert got == code
    assert ("ACCEPT" if code == 0 else "REJECT") in text


def test_accept_prints_reachable_states(capsys):
    _, text, _ = run(capsys, "accept", PROBLEMS / "a_int.cta", "f(s(0), s(0))")
    assert "reachable: {q1, q2}" in text


def test_accept_bad_term(capsys):
    assert run(capsys, "accept", PROBLEMS / "a_int.cta", "f(0")[0] == 2
    assert run(capsys, "accept", PROBLEMS / "a_int.cta", "f(x, 0)")[0] == 2


def test_verify_problem(capsys):
    code, text, _ = run(capsys, "verify", PROBLEMS / "example6.ctp", "--depth", "5")
    assert code == 0
    assert "FAIL" not in text and text.count("PASS") == 5


def test_verify_nondeterministic(capsys):
    code, text, _ = run(capsys, "verify", PROBLEMS / "a_int.cta", "--depth", "3")
    assert code == 1
    assert "deterministic (static): FAIL" in text
    assert "f(s(0), s(0)) reaches" in text


def test_verify_empty_rules(tmp_path, capsys):
    path = tmp_path / "none.cta"
    path.write_text("cta\nstructure nat\nstate q final\n")
    code, text, _ = run(capsys, "verify", path)
    assert code == 1 and "complete (static): FAIL" in text


def test_product_command(tmp_path, capsys):
    a, b, out = tmp_path / "a.cta", tmp_path / "b.cta", tmp_path / "p.cta"
    run(capsys, "build", PROBLEMS / "nonpos.ctp", "-o", a)
    run(capsys, "build", PROBLEMS / "fsucc.ctp", "-o", b)
    code, text, _ = run(capsys, "product", a, b, "-o", out)
    assert code == 0
    P = parse_automaton(out.read_text())
    assert len(P.finals) == 1  # emptiness needs pruning here


def test_product_mismatched_signatures(tmp_path, capsys):
    a, out = tmp_path / "a.cta", tmp_path / "p.cta"
    run(capsys, "build", PROBLEMS / "nonpos.ctp", "-o", a)
    code, _, _ = run(capsys, "product", a, PROBLEMS / "a_int.cta", "-o", out)
    assert code == 2 and not out.exists()


@pytest.mark.parametrize(
    "a, b, code, text",
    [
        ("nonpos.ctp", "pos.ctp", 0, "EMPTY"),
        ("nonpos.ctp", "fsucc.ctp", 0, "EMPTY"),
        ("nonpos.ctp", "nonpos.ctp", 1, "NONEMPTY(f(0))"),
        ("empty.ctp", "nonpos.ctp", 0, "EMPTY"),
    ],
)
def test_empty(capsys, a, b, code, text):
    got, out, _ = run(capsys, "empty", PROBLEMS / a, PROBLEMS / b)
    assert got == code and out.strip() == text


def test_empty_unknown(tmp_path, capsys):
    deep = tmp_path / "deep.ctp"
    deep.write_text("structure nat\nfun f : 1\nterm f(f(f(f(x))))\n")
    code, out, _ = run(capsys, "empty", deep, deep, "--depth", "3")
    assert code == 3 and out.strip() == "UNKNOWN"


def test_enum(capsys):
    code, out, _ = run(capsys, "enum", PROBLEMS / "example6.ctp", "--depth", "2")
    assert code == 0 and out.split() == ["0", "s(0)", "f(0)"]
    code, out, _ = run(capsys, "enum", PROBLEMS / "example6.ctp", "--depth", "3", "--members")
    assert out.split() == ["f(0)", "f(s(0))"]


def test_missing_file(capsys):
    assert run(capsys, "verify", "/nonexistent/x.ctp")[0] == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ctagen.cli", "accept", str(PROBLEMS / "a_int.cta"), "f(0, s(0))"], capture_output=True, text=True)
    assert proc.returncode == 1 and "REJECT" in proc.stdout
