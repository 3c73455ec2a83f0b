from __future__ import annotations

import random

import pytest

import gen
from hfproof import calculus as K
from hfproof.calculus import AxiomBase, Derivation, ExtraAxiomRejected, InvalidRule, check
from hfproof.grammar import parse_fm, parse_tm
from hfproof.semantics import eval_fm
from hfproof.syntax import FLS, Neg, Var


def test_schema_instances_are_true():
    rng = random.Random(5)
    for a in gen.axiom_instances(rng, 150):
        for _ in range(3):
            assert eval_fm(gen.env(rng), a, 24, closed_world=True) is True


def test_fuzzed_derivations_check():
    rng = random.Random(11)
    pool = gen.DerivationFuzzer(rng).grow(400)
    for d in pool:
        j = check(d)
        assert j.concl is d.concl and j.hyps == frozenset()


def _mutants(d: Derivation, rng):
    """Copies of ``d`` with one node's recorded conclusion changed."""
    order = K.nodes(d)
    target = rng.choice(order)
    copies: dict = {}

    def copy(n):
        if id(n) in copies:
            return copies[id(n)]
        kids = tuple(copy(c) for c in n.children)
        concl = Neg(n.concl) if n is target else n.concl
        r = Derivation(n.rule, n.args, kids, concl, n.hyps)
        copies[id(n)] = r
        return r

    return copy(d)


def test_conclusion_mutations_rejected():
    rng = random.Random(3)
    pool = gen.DerivationFuzzer(rng).grow(300)
    for d in pool[::3]:
        with pytest.raises(InvalidRule):
            check(_mutants(d, rng))


def test_mp_requires_matching_antecedent():
    a = K.bool_ax("B1", parse_fm("0 IN 0"))
    b = K.hf_ax("HF1", parse_tm("0"))
    with pytest.raises(ValueError):
        K.mp(a, b)
    bad = Derivation("mp", (), (a, b), parse_fm("0 IN 0"), frozenset())
    with pytest.raises(InvalidRule) as info:
        check(bad)
    assert info.value.reason in ("antecedent-mismatch", "not-an-implication")


def test_exists_freshness():
    d = K.hyp(parse_fm("x IN y -> x IN y"))
    with pytest.raises(ValueError):
        K.exists(d, "x")
    forged = Derivation("exists", ("x",), (d,), parse_fm("(Ex x. x IN y) -> x IN y"), d.hyps)
    with pytest.raises(InvalidRule) as info:
        check(forged)
    assert info.value.reason == "freshness"


def test_hypotheses_are_tracked():
    h = parse_fm("x IN y")
    d = K.hyp(h)
    assert check(d).hyps == frozenset({h})
    assert check(d, hyps=[h, FLS]).hyps == frozenset({h, FLS})
    with pytest.raises(InvalidRule):
        check(d, hyps=[])


def test_induction_freshness():
    with pytest.raises(K.NonFreshName):
        K.induction(parse_fm("x IN j"), "x", "j")
    assert K.ind(parse_fm("x IN y | ~ x IN y"), "x", "v").concl.level == 0


def test_extra_axiom():
    base = AxiomBase(parse_fm("0 = 0"))
    d = K.extra(base)
    assert check(d, base).concl is parse_fm("0 = 0")
    with pytest.raises(InvalidRule):
        check(d)
    with pytest.raises(ExtraAxiomRejected):
        AxiomBase(parse_fm("0 IN 0"))


def test_raw_nodes_are_validated():
    raw = Derivation("spec", (parse_fm("x IN x"), "x", Var("y")), (), None, frozenset())
    K.reconstruct(raw)
    assert raw.concl is parse_fm("y IN y -> Ex x. x IN x")
    junk = Derivation("bool", ("B9", parse_fm("0 IN 0")), (), None, frozenset())
    with pytest.raises(InvalidRule):
        K.reconstruct(junk)
