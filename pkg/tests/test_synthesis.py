from __future__ import annotations

import random

import pytest

import gen
from hfproof.calculus import check
from hfproof.derived import and_intro, imp_refl
from hfproof.grammar import parse_fm, parse_tm
from hfproof.hf_model import member, subset_of
from hfproof.object_predicates import PREDICATES
from hfproof.semantics import eval_fm, eval_tm
from hfproof.synthesis import (
    BadInterface,
    GroundAtom,
    NotGround,
    NotStrictSigma,
    NotTrue,
    check_sigma_certificate,
    diag,
    diag_fixpoint_check,
    godel_sentence,
    prove_ground_atom,
    prove_strict_sigma,
    sigma_normalize,
    strict_sigma_check,
)
from hfproof.syntax import Iff, Neg, Subs


def test_strict_shapes():
    ok = strict_sigma_check(parse_fm("Ex x. All2 y : x . y IN z | Ex w. w IN y & y IN w"))
    assert ok and {rule for _, rule in ok.evidence} == {"ExI", "All2I", "DisjI", "ConjI", "MemI"}
    for text, where in [
        ("x = y", ()),
        ("~ x IN y", ()),
        ("Ex x. x IN 0", (0,)),
        ("All2 y : x . y IN x", ()),
        ("x IN y | All2 y : (x <| x) . y IN y", (1,)),
    ]:
        r = strict_sigma_check(parse_fm(text))
        assert not r and r.path == where, (text, r)
        assert str(r).startswith("not strict")


def test_normalize_gives_strict_equivalent():
    rng = random.Random(6)
    confirmed = 0
    for _ in range(60):
        a = gen.sigma_sentence(rng, 4)
        try:
            b = sigma_normalize(a)
        except NotStrictSigma:
            # negated atoms are outside the normaliser's positive input
            continue
        assert strict_sigma_check(b)
        assert b.fv <= a.fv
        if eval_fm({}, a, budget=64) is not True:
            continue
        # the extra existentials name term values; search may need more room
        r = eval_fm({}, b, budget=64)
        assert r is not False
        confirmed += r is True
    assert confirmed >= 10


@pytest.mark.parametrize("name", list(PREDICATES))
def test_predicates_normalize(name):
    pred = PREDICATES[name]()
    b = sigma_normalize(pred.formula)
    assert strict_sigma_check(b)
    assert b.fv == pred.formula.fv


def test_ground_atoms_sample():
    rng = random.Random(9)
    for _ in range(150):
        s, t = gen.term(rng, 3, ()), gen.term(rng, 3, ())
        rel = rng.choice(("Mem", "Eq", "Subs"))
        sv, tv = eval_tm({}, s), eval_tm({}, t)
        expected = {"Mem": member(sv, tv), "Eq": sv is tv, "Subs": subset_of(sv, tv)}[rel]
        ok, d = prove_ground_atom(GroundAtom(rel, s, t))
        assert ok is expected
        target = GroundAtom(rel, s, t).formula()
        j = check(d)
        assert not j.hyps and j.concl is (target if ok else Neg(target))


def test_ground_atom_inputs():
    ok, d = prove_ground_atom(parse_fm("0 IN (0 <| 0)"))
    assert ok
    ok, d = prove_ground_atom(Subs(parse_tm("0 <| 0"), parse_tm("0")))
    assert not ok and check(d).concl is Neg(Subs(parse_tm("0 <| 0"), parse_tm("0")))
    with pytest.raises(NotGround):
        prove_ground_atom(parse_fm("x IN 0"))


def test_sigma_synthesis():
    rng = random.Random(12)
    done = 0
    while done < 15:
        a = gen.sigma_sentence(rng, rng.randint(3, 6))
        if eval_fm({}, a, budget=64) is not True:
            continue
        j = check(prove_strict_sigma(a))
        assert j.concl is a and not j.hyps
        done += 1


def test_sigma_synthesis_refuses():
    with pytest.raises(NotTrue):
        prove_strict_sigma(parse_fm("Ex x. x IN 0"))
    with pytest.raises(NotGround):
        prove_strict_sigma(parse_fm("Ex x. x IN y"))


def test_certificate():
    a = parse_fm("Ex x. x IN y")
    d = and_intro(imp_refl(a), imp_refl(a))
    assert check(d).concl is Iff(a, a)
    assert check_sigma_certificate(a, a, d)
    assert not check_sigma_certificate(a, parse_fm("Ex x. x IN z"), d)
    assert not check_sigma_certificate(parse_fm("y = y"), parse_fm("y = y"), d)


def test_diag_free_names():
    rng = random.Random(1)
    for _ in range(30):
        alpha = gen.formula(rng, 5, names=("i", "x", "y"))
        assert diag(alpha, "i").fv == alpha.fv - {"i"}


@pytest.mark.parametrize("text,expected", [("~ i = 0", True), ("i IN i", False)])
def test_diag_fixpoint(text, expected):
    left, right = diag_fixpoint_check(parse_fm(text), "i")
    assert left is right is expected


def test_godel_sentence():
    pfp = parse_fm("Ex p. p IN i")
    g = godel_sentence(pfp, "i")
    assert not g.fv
    with pytest.raises(BadInterface):
        godel_sentence(parse_fm("i IN x"), "i")
