from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gen
from hfproof.grammar import parse_fm, parse_tm
from hfproof.hf_model import eats, empty, from_ack_index, is_pair, member, ordinal, pair
from hfproof.semantics import BudgetExhausted, Undecided, eval_fm, eval_tm, holds_sigma, parse_path
from hfproof.syntax import Bound, Disj, Eats, Eq, Mem, Neg, Var, Zero, fresh_name, instantiate

seeds = st.randoms(use_true_random=False)


def naive_tm(env, t):
    if type(t) is Zero:
        return empty()
    if type(t) is Var:
        return env.get(t.name, empty())
    return eats(naive_tm(env, t.left), naive_tm(env, t.right))


def naive_fm(env, a):
    """Direct recursion; only handles existentials guarded by ``x IN t``."""
    cls = type(a)
    if cls is Mem:
        return member(naive_tm(env, a.left), naive_tm(env, a.right))
    if cls is Eq:
        return naive_tm(env, a.left) is naive_tm(env, a.right)
    if cls is Neg:
        return not naive_fm(env, a.body)
    if cls is Disj:
        return naive_fm(env, a.left) or naive_fm(env, a.right)
    v = fresh_name(set(env) | a.fv, "q")
    body = instantiate(a.body, Var(v))
    # shape ~(~(v IN t) | B), covering both guarded Ex and All2
    assert type(body) is Neg and type(body.body) is Disj
    guard = body.body.left
    assert type(guard) is Neg and type(guard.body) is Mem and guard.body.left is Var(v)
    return any(naive_fm({**env, v: m}, body) for m in naive_tm(env, guard.body.right))


@settings(max_examples=300, deadline=None)
@given(seeds)
def test_agrees_with_naive_evaluator(rng):
    a = gen.formula(rng, 9, bounded=True)
    e = gen.env(rng)
    assert eval_fm(e, a) == naive_fm(e, a)


def test_terms():
    assert eval_tm({}, parse_tm("(0 <| 0) <| (0 <| 0)")) is ordinal(2)
    assert eval_tm({"x": ordinal(3)}, parse_tm("x <| 0")) is ordinal(3)
    # unbound names default to the empty set
    assert eval_tm({}, parse_tm("y")) is empty()
    with pytest.raises(ValueError):
        eval_tm({}, Eats(Zero(), Bound(0)))


def test_guarded_search_is_complete():
    assert eval_fm({"y": ordinal(3)}, parse_fm("Ex x. x IN y & ~ x = 0 & ~ x = (0 <| 0)")) is True
    assert eval_fm({"y": ordinal(2)}, parse_fm("Ex x. x IN y & x = y")) is False
    assert eval_fm({}, parse_fm("Ex x. (x <| x) = y")) is False
    assert eval_fm({"p": pair(ordinal(1), ordinal(4))}, parse_fm("Ex a. Ex b. p = ((0 <| (0 <| a)) <| ((0 <| a) <| b)) & b = a")) is False


def test_unguarded_search_and_budget():
    assert eval_fm({}, parse_fm("Ex x. (0 <| 0) IN x")) is True
    r = eval_fm({}, parse_fm("Ex x. x IN x"), budget=16)
    assert isinstance(r, BudgetExhausted) and r.budget == 16
    with pytest.raises(TypeError):
        bool(r)
    assert eval_fm({}, parse_fm("Ex x. x IN x"), budget=16, closed_world=True) is False
    assert eval_fm({}, parse_fm("All x. ~ x IN x"), budget=16, closed_world=True) is True
    with pytest.raises(ValueError):
        eval_fm({}, parse_fm("0 = 0"), budget=0)


def test_hints():
    big = from_ack_index(5000)
    a = parse_fm("Ex x. w IN x")
    assert isinstance(eval_fm({"w": big}, a, budget=4), BudgetExhausted)
    hinted = eval_fm({"w": big}, a, budget=4, hints={(): [eats(empty(), big)]}, strict_hints=True)
    assert hinted is True
    # a strict hint that does not work means false, not a wider search
    assert eval_fm({}, parse_fm("Ex x. x = (0 <| 0)"), hints={(): [empty()]}, strict_hints=True) is False
    assert eval_fm({}, parse_fm("Ex x. x = (0 <| 0)"), hints={(): [empty()]}) is True


def test_hint_paths():
    assert parse_path("") == ()
    assert parse_path("0.1.0") == (0, 1, 0)
    a = parse_fm("0 IN 0 | Ex x. x IN x")
    assert eval_fm({}, a, budget=2, hints={(1,): [empty()]}, strict_hints=True) is False
    found = from_ack_index(77)
    b = parse_fm("0 IN 0 | Ex x. x = w")
    assert eval_fm({"w": found}, b, budget=2, hints={"1": [found]}, strict_hints=True) is True


def test_holds_sigma():
    assert holds_sigma({}, parse_fm("Ex x. x IN (0 <| 0)")) is True
    with pytest.raises(Undecided):
        holds_sigma({}, parse_fm("Ex x. x IN x"), cap=8)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=1 << 14), st.booleans())
def test_pair_shaped_guards(n, from_pair):
    p = from_ack_index(n)
    if from_pair:
        p = pair(from_ack_index(n % 97), p)
    a = parse_fm("Ex a. Ex b. p = ((0 <| (0 <| a)) <| ((0 <| a) <| b))")
    assert eval_fm({"p": p}, a) is is_pair(p)
