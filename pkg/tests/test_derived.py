from __future__ import annotations

import itertools
import random

import pytest

import gen
from hfproof import calculus as K
from hfproof import derived as D
from hfproof.calculus import check
from hfproof.grammar import parse_fm, parse_tm
from hfproof.syntax import FLS, All, And, Disj, Imp, Neg

P, Q, R = parse_fm("x IN y"), parse_fm("y = z"), parse_fm("Ex u. u IN x")


def prop(rng, size):
    if size <= 1:
        return rng.choice((P, Q, R))
    roll = rng.random()
    if roll < 0.25:
        return Neg(prop(rng, size - 1))
    k = rng.randint(1, size - 1)
    return rng.choice((Disj, And, Imp))(prop(rng, k), prop(rng, max(1, size - k - 1)))


def truth(a, v):
    if a in v:
        return v[a]
    if type(a) is Neg:
        return not truth(a.body, v)
    return truth(a.left, v) or truth(a.right, v)


def tautology(a) -> bool:
    return all(truth(a, dict(zip((P, Q, R), bits))) for bits in itertools.product((False, True), repeat=3))


def test_prove_taut_against_truth_tables():
    rng = random.Random(2)
    proved = refused = 0
    for _ in range(300):
        a = prop(rng, rng.randint(2, 9))
        if tautology(a):
            d = D.prove_taut(a, [P, Q, R])
            j = check(d)
            assert j.concl is a and not j.hyps
            proved += 1
        else:
            with pytest.raises(D.NotATautology):
                D.prove_taut(a, [P, Q, R])
            refused += 1
    assert proved > 20 and refused > 20


def test_basic_rules():
    assert check(D.imp_refl(P)).concl is Imp(P, P)
    assert check(D.lem(P)).concl is Disj(P, Neg(P))
    assert check(D.dni(P)).concl is Imp(P, Neg(Neg(P)))
    assert check(D.dne(P)).concl is Imp(Neg(Neg(P)), P)
    assert check(D.not_fls()).concl is Neg(FLS)


def test_conjunction_rules():
    hp, hq = K.hyp(P), K.hyp(Q)
    both = D.and_intro(hp, hq)
    assert check(both).concl is And(P, Q)
    assert check(D.and_left(both)).concl is P
    assert check(D.and_right(both)).concl is Q
    assert check(both).hyps == frozenset({P, Q})


def test_deduction_discharges():
    hp = K.hyp(P)
    d = D.and_intro(hp, D.imp_refl(Q))
    out = D.deduction(d, P)
    j = check(out)
    assert j.concl is Imp(P, And(P, Imp(Q, Q))) and not j.hyps
    with pytest.raises(D.HypNotPresent):
        D.deduction(D.imp_refl(Q), P)


def test_deduction_on_fuzzed_derivations():
    rng = random.Random(8)
    marked = parse_fm("z IN (x <| y)")
    pool = gen.DerivationFuzzer(rng, hyp=marked).grow(300)
    seen = 0
    for d in pool:
        if marked in d.hyps:
            j = check(D.deduction(d, marked))
            assert j.concl is Imp(marked, d.concl)
            assert j.hyps == d.hyps - {marked}
            seen += 1
    assert seen > 30


def test_quantifier_rules():
    a = parse_fm("x IN (x <| y)")
    gen_all = D.all_intro(check_only(D.prove_taut(Disj(a, Neg(a)))), "x")
    assert check(gen_all).concl is parse_fm("All x. x IN (x <| y) | ~ x IN (x <| y)")
    inst = D.all_elim(gen_all, parse_tm("0"))
    assert check(inst).concl is parse_fm("0 IN (0 <| y) | ~ 0 IN (0 <| y)")
    ex = D.ex_intro(K.hyp(parse_fm("0 IN w")), parse_fm("x IN w"), "x", parse_tm("0"))
    assert check(ex).concl is parse_fm("Ex x. x IN w")


def check_only(d):
    check(d)
    return d


def test_equality_rules():
    t = parse_tm("x")
    e1, e2 = K.hyp(parse_fm("x = y <| 0")), K.hyp(parse_fm("y <| 0 = z"))
    assert check(D.eq_refl(t)).concl is parse_fm("x = x")
    assert check(D.eq_sym(e1)).concl is parse_fm("y <| 0 = x")
    assert check(D.eq_trans(e1, e2)).concl is parse_fm("x = z")


def test_weaken_and_chain():
    d = D.weaken(D.imp_refl(P), [Q])
    assert check(d).hyps == frozenset({Q})
    chain = D.taut_chain(Q, [K.hyp(P), K.hyp(Imp(P, Q))], [P, Q])
    assert check(chain).concl is Q


def test_all_intro_imp_and_pre_compose():
    excluded = Disj(P, Neg(P))
    d = D.prove_taut(Imp(Q, excluded), [Q, P])
    lifted = D.all_intro_imp(d, "x")
    assert check(lifted).concl is Imp(Q, All("x", excluded))
    with pytest.raises(ValueError):
        D.all_intro_imp(D.imp_refl(P), "x")
    weaker = D.prove_taut(Imp(P, Disj(P, Q)), [P, Q])
    composed = D.pre_compose(weaker, R)
    assert check(composed).concl is Imp(Imp(Disj(P, Q), R), Imp(P, R))
