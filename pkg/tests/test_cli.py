from __future__ import annotations

import io
import subprocess
import sys

import pytest

from hfproof.cli import run
from hfproof.coding import enc_fm
from hfproof.grammar import parse_fm
from hfproof.hf_model import format_set


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_eval():
    assert call("eval", "0 IN (0 <| 0)") == (0, "True\n")
    assert call("eval", "0 IN 0") == (1, "False\n")
    code, text = call("eval", "Ex x. x IN x", "--budget", "8")
    assert code == 1 and text.startswith("Unknown")


def test_env_and_hints_files(tmp_path):
    env = tmp_path / "env.txt"
    env.write_text("# values\ny = {{}, {{}}}\n")
    assert call("eval", "(0 <| 0) IN y", "--env", str(env)) == (0, "True\n")
    hints = tmp_path / "hints.txt"
    hints.write_text(". = {{{}}}\n")
    assert call("eval", "Ex x. (0 <| 0) IN x", "--hints", str(hints), "--budget", "2")[0] == 0
    bad = tmp_path / "bad.txt"
    bad.write_text("y {}\n")
    assert call("eval", "y = y", "--env", str(bad))[0] == 2


def test_synth_then_check(tmp_path):
    code, proof = call("synth", "Ex x. x IN ((0 <| 0) <| 0)")
    assert code == 0 and proof.startswith("(")
    f = tmp_path / "p.sexpr"
    f.write_text(proof)
    assert call("check", str(f)) == (0, "|- Ex x. x IN ((0 <| 0) <| 0)\n")
    # deterministic output
    assert call("synth", "Ex x. x IN ((0 <| 0) <| 0)")[1] == proof


def test_check_rejects(tmp_path):
    f = tmp_path / "bad.sexpr"
    f.write_text('(mp (hyp "0 IN 0") (hyp "0 IN 0"))')
    code, text = call("check", str(f))
    assert code == 1 and text.startswith("rejected")
    f.write_text("(mp")
    assert call("check", str(f))[0] == 2
    assert call("check", str(tmp_path / "missing"))[0] == 2


def test_synth_failures():
    assert call("synth", "Ex x. x IN 0")[0] == 1
    assert call("synth", "Ex x. x IN y")[0] == 2


def test_atom():
    assert call("atom", "(0 <| 0) = (0 <| (0 <| 0))") == (1, "False\n")
    code, text = call("atom", "0 IN (0 <| 0)", "--format", "sexpr")
    assert code == 0 and text.startswith("(")
    assert call("atom", "x IN 0")[0] == 2


def test_enc_dec_quote():
    code, text = call("enc", "Ex x. x IN y")
    assert code == 0
    assert text.strip() == format_set(enc_fm(parse_fm("Ex x. x IN y")), compact=True)
    assert call("dec", text.strip()) == (0, "Ex x. x IN y\n")
    code, text = call("dec", "{{{}}}")
    assert code == 1 and text.startswith("not a code")
    assert call("dec", "{{}}") == (0, "a\n")
    assert call("dec", "{{")[0] == 2
    code, text = call("quote", "0 IN 0")
    assert code == 0 and "<|" in text


def test_diag_and_ord():
    code, text = call("diag", "~ i = 0")
    assert code == 0 and parse_fm(text).fv == frozenset()
    assert call("ord", "x") == (0, "24\n")
    assert call("ord", "24") == (0, "x\n")
    assert call("ord", "0")[0] == 2
    assert call("diag", "i = i", "--var", "1i")[0] == 2


@pytest.mark.parametrize("argv", [[], ["bogus"], ["eval"], ["eval", "0 = 0", "--budget", "0"], ["eval", "0 ="]])
def test_usage_errors(argv):
    assert call(*argv)[0] == 2


def test_entry_point():
    r = subprocess.run(
        [sys.executable, "-c", "import sys; from hfproof.cli import main; sys.exit(main())", "eval", "0 = 0"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert r.returncode == 0 and r.stdout == "True\n"
