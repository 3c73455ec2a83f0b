from __future__ import annotations

import random

import pytest

import gen
from hfproof import derived as D
from hfproof.calculus import InvalidRule, check
from hfproof.grammar import parse_fm
from hfproof.sexpr import SexprError, parse_sexpr, read_derivation, write_derivation


def test_roundtrip_fuzzed():
    rng = random.Random(21)
    pool = gen.DerivationFuzzer(rng, hyp=parse_fm("x = (y <| 0)")).grow(250)
    for d in pool[::5]:
        text = write_derivation(d)
        back = read_derivation(text)
        assert check(back).concl is d.concl
        assert back.hyps == d.hyps
        assert write_derivation(back) == text


def test_sharing_uses_let():
    a = parse_fm("Ex x. x IN (y <| y)")
    d = D.and_intro(D.imp_refl(a), D.imp_refl(a))
    text = write_derivation(d)
    assert "(let @" in text
    assert check(read_derivation(text)).concl is d.concl


def test_hand_written():
    text = '(def $1 "0 IN x") (mp (mp (bool B4 "~$1" "$1 | $1" "$1") (bool B1 "$1")) (bool B2 "$1" "$1"))'
    assert check(read_derivation(text)).concl is parse_fm("0 IN x -> 0 IN x")


@pytest.mark.parametrize(
    "text",
    ["(mp", "(foo)", '(hyp "x IN")', "", '(hyp "0 IN 0") junk', '(hyp "0 IN 0"))'],
)
def test_malformed(text):
    with pytest.raises(SexprError):
        read_derivation(text)


@pytest.mark.parametrize("text", ["(bool B1)", '(mp (hyp "0 IN 0") (hyp "0 IN 0"))', '(exists (hyp "x IN x -> 0 IN 0") x)'])
def test_rejected_by_kernel(text):
    with pytest.raises(InvalidRule):
        read_derivation(text)


def test_parse_sexpr():
    assert parse_sexpr('(a "b c" (d))') == [["a", "b c", ["d"]]]
