from __future__ import annotations

import random

import pytest

import instances
from hfproof.coding import enc_fm, enc_tm, var_code
from hfproof.grammar import parse_fm, parse_tm
from hfproof.hf_model import ordinal
from hfproof.object_predicates import PREDICATES, FreshnessExhausted, conj, disj, exists, make_form_p, q_p
from hfproof.semantics import eval_fm, eval_tm
from hfproof.syntax import Eq, Var

FAST = [n for n in PREDICATES if n != "krp_p"]


@pytest.mark.parametrize("name", FAST)
def test_two_level_agreement(name):
    pred = PREDICATES[name]()
    rng = random.Random(sum(map(ord, name)))
    pos, neg = instances.sample(name, rng, pred, 40)
    assert all(pred.evaluate(*v) is True for v in pos)
    assert neg and all(pred.evaluate(*v) is False for v in neg)


def test_krp_agreement():
    pred = PREDICATES["krp_p"]()
    pos, neg = instances.sample("krp_p", random.Random(0), pred, 6)
    assert all(pred.evaluate(*v) is True for v in pos)
    assert all(pred.evaluate(*v) is False for v in neg)


@pytest.mark.parametrize("name", list(PREDICATES))
def test_free_names_are_parameters(name):
    pred = PREDICATES[name]()
    assert pred.formula.fv == frozenset(pred.params)
    assert not pred.formula.level


def test_custom_parameter_names():
    pred = q_p("p", "c")
    assert pred.params == ("p", "c")
    t = parse_tm("(0 <| 0) <| 0")
    assert pred.evaluate(ordinal(1), enc_tm(t)) is True
    assert pred.evaluate(ordinal(2), enc_tm(t)) is False


def test_instantiate_keeps_slots():
    pred = q_p()
    t = parse_tm("0 <| (0 <| 0)")
    built = pred.instantiate({"x": Var("y"), "r": Var("c")})
    env = {"y": eval_tm({}, t), "c": enc_tm(t)}
    assert eval_fm(env, built.formula, hints=built.hints(env), strict_hints=True) is True


def test_hints_fall_back_on_junk():
    pred = PREDICATES["subst_form_p"]()
    env = pred.env(var_code("x"), ordinal(0), ordinal(5), ordinal(7))
    hints = pred.hints(env)
    assert hints and all(v is not None for v in hints.values())
    assert pred.evaluate(var_code("x"), ordinal(0), ordinal(5), ordinal(7)) is False


def test_reserved_name():
    with pytest.raises(FreshnessExhausted):
        make_form_p("k_", "u", "w")


def test_combinators_track_paths():
    w = lambda env: ordinal(3)  # noqa: E731
    b = conj(parse_fm("0 = 0"), exists("z", Eq(Var("z"), Var("z")), w))
    assert [p for p, _, _ in b.slots] == [(0, 1, 0)]
    b = disj(parse_fm("0 IN 0"), exists("z", Eq(Var("z"), Var("q")), w))
    assert [p for p, _, _ in b.slots] == [(1,)]
    assert eval_fm({"q": ordinal(3)}, b.formula, hints=b.hints({}), strict_hints=True) is True
    assert eval_fm({"q": ordinal(2)}, b.formula, hints=b.hints({}), strict_hints=True) is False


def test_make_form_vacuous_binder():
    pred = make_form_p()
    u = parse_fm("0 IN 0")
    y = enc_fm(parse_fm("Ex x. 0 IN 0"))
    assert pred.meta(y, enc_fm(u), enc_fm(u))
    assert pred.evaluate(y, enc_fm(u), enc_fm(u)) is True
