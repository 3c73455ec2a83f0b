from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gen
from hfproof.calculus import AxiomBase, extra, hyp
from hfproof.coding import (
    Q_EX,
    RULE_TAGS,
    Q_NEG,
    NotACode,
    abst_code,
    canonical_term,
    dec_fm,
    dec_tm,
    enc_derivation,
    enc_fm,
    enc_tm,
    k_apply,
    make_form,
    pf_meta_check,
    pseudo_quote,
    quote_fm,
    quote_tm,
    subst_code,
    tuple3,
    var_code,
    var_codes_in,
)
from hfproof.grammar import parse_fm
from hfproof.hf_model import from_ack_index, ordinal, pair, seq_from_list, seq_to_list, unpair
from hfproof.semantics import eval_tm
from hfproof.syntax import Disj, Neg, Var, abstract_fm, mk_ex, subst_fm

seeds = st.randoms(use_true_random=False)


@settings(max_examples=200, deadline=None)
@given(seeds)
def test_encode_decode(rng):
    a = gen.formula(rng, 10)
    assert dec_fm(enc_fm(a)) is a
    t = gen.term(rng, 3)
    assert dec_tm(enc_tm(t)) is t


def test_codes_are_injective_on_a_sample():
    rng = random.Random(4)
    seen: dict = {}
    for _ in range(500):
        a = gen.formula(rng, 6)
        c = enc_fm(a)
        assert seen.setdefault(c, a) is a


@pytest.mark.parametrize("n", [0, 3, 5, 100, 4097])
def test_non_codes_rejected(n):
    x = from_ack_index(n)
    with pytest.raises(NotACode):
        dec_fm(pair(ordinal(9), x))
    if n == 0:
        with pytest.raises(NotACode):
            dec_fm(x)


@given(st.integers(min_value=0, max_value=1 << 20))
def test_canonical_terms(n):
    x = from_ack_index(n)
    t = canonical_term(x)
    assert not t.fv
    assert eval_tm({}, t) is x


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_quotation_evaluates_to_code(rng):
    a = gen.formula(rng, 8)
    assert eval_tm({}, quote_fm(a)) is enc_fm(a)
    t = gen.term(rng, 2)
    assert eval_tm({}, quote_tm(t)) is enc_tm(t)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_pseudo_quotation(rng):
    a = gen.formula(rng, 6)
    keep = {n for n in gen.NAMES if rng.random() < 0.5}
    q = pseudo_quote(a, keep)
    assert q.fv <= frozenset(keep)
    env = gen.env(rng, sorted(keep))
    assert eval_tm(env, q) is enc_fm(a, {n: env[n] for n in keep})


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_code_level_substitution(rng):
    a = gen.formula(rng, 8)
    t = gen.term(rng, 2)
    i = rng.choice(gen.NAMES)
    assert subst_code(var_code(i), enc_tm(t), enc_fm(a)) is enc_fm(subst_fm(a, i, t))
    assert enc_fm(mk_ex(i, a)) is pair(Q_EX, abst_code(var_code(i), 0, enc_fm(a)))
    assert abst_code(var_code(i), 0, enc_fm(a)) is enc_fm(abstract_fm(i, a))


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_k_apply(rng):
    a = gen.formula(rng, 6)
    i = rng.choice(gen.NAMES)
    assert k_apply(i, a) is enc_fm(subst_fm(a, i, quote_fm(a)))


def test_var_codes_in():
    a = parse_fm("Ex x. x IN y | z = 0")
    assert var_codes_in(enc_fm(a)) == {var_code("y"), var_code("z")}


def test_make_form():
    u, w = enc_fm(parse_fm("x IN y")), enc_fm(parse_fm("0 = 0"))
    assert make_form(enc_fm(Disj(parse_fm("x IN y"), parse_fm("0 = 0"))), u, w)
    assert make_form(pair(Q_NEG, u), u, w)
    assert make_form(enc_fm(parse_fm("Ex x. x IN y")), u, w)
    assert not make_form(enc_fm(parse_fm("Ex x. x IN x")), u, w)
    assert not make_form(tuple3(ordinal(5), w, u), u, w)
    assert not make_form(ordinal(3), u, w)


def test_pf_meta_check_on_fuzzed_derivations():
    rng = random.Random(17)
    pool = gen.DerivationFuzzer(rng).grow(200)
    for d in pool[::4]:
        s = enc_derivation(d)
        assert pf_meta_check(s, enc_fm(d.concl))
        assert not pf_meta_check(s, enc_fm(Neg(d.concl)))
        steps = seq_to_list(s)
        # an mp step pointing at itself is never acceptable
        mps = [k for k, step in enumerate(steps) if _is_mp(step)]
        for k in mps[:2]:
            concl, rule, _ = _parts(steps[k])
            bad = steps[:k] + [tuple3(concl, rule, pair(ordinal(k), ordinal(k)))] + steps[k + 1 :]
            assert not pf_meta_check(seq_from_list(bad), enc_fm(d.concl))


def _parts(step):
    concl, rest = unpair(step)
    rule, payload = unpair(rest)
    return concl, rule, payload


def _is_mp(step):
    return _parts(step)[1] is ordinal(RULE_TAGS["mp"])


def test_pf_meta_check_rejects_hypotheses_and_junk():
    d = hyp(parse_fm("0 IN 0"))
    assert not pf_meta_check(enc_derivation(d), enc_fm(d.concl))
    assert not pf_meta_check(ordinal(4), enc_fm(d.concl))
    assert not pf_meta_check(seq_from_list([]), enc_fm(d.concl))


def test_extra_axiom_steps():
    base = AxiomBase(parse_fm("Ex x. x = 0"))
    d = extra(base)
    assert pf_meta_check(enc_derivation(d), enc_fm(d.concl), base)
    assert not pf_meta_check(enc_derivation(d), enc_fm(d.concl))


def test_variable_codes():
    assert var_code("a") is ordinal(1)
    assert enc_tm(Var("b")) is ordinal(2)
