"""Derived rules built on the kernel: every function returns a plain
:class:`~hfproof.calculus.Derivation` that :func:`~hfproof.calculus.check`
re-verifies from the primitive rules.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterable, Sequence

from hfproof._deep import deep
from hfproof.calculus import Derivation, bool_ax, eq_ax, exists, hf_ax, hyp, mp, spec
from hfproof.syntax import (
    FLS,
    ZERO,
    Disj,
    Eq,
    Formula,
    Imp,
    Mem,
    Neg,
    Or,
    Term,
    Var,
    fresh_name,
    instantiate,
    match_all,
    match_and,
    match_imp,
    subst_fm,
)

__all__ = [
    "HypNotPresent",
    "NotATautology",
    "hs",
    "imp_refl",
    "lem",
    "dni",
    "dne",
    "k_intro",
    "or_elim",
    "permute",
    "contract",
    "deduction",
    "weaken",
    "prove_taut",
    "taut_chain",
    "and_intro",
    "and_left",
    "and_right",
    "iff_mp",
    "iff_mpr",
    "all_elim",
    "all_intro",
    "all_elim_imp",
    "all_intro_imp",
    "pre_compose",
    "ex_intro",
    "not_fls",
    "eq_refl",
    "eq_sym",
    "eq_trans",
]


class HypNotPresent(ValueError):
    pass


class NotATautology(ValueError):
    def __init__(self, valuation: dict):
        super().__init__("formula is false under a valuation of its atoms")
        self.valuation = valuation


def _imp(a: Formula):
    parts = match_imp(a)
    if parts is None:
        raise ValueError(f"not an implication: {a!r}")
    return parts


# propositional basics ----------------------------------------------------------


def syll(d: Derivation, a: Formula) -> Derivation:
    """From ``B -> C`` derive ``(A | B) -> (A | C)``."""
    b, c = _imp(d.concl)
    return mp(bool_ax("B4", a, b, c), d)


def hs(d1: Derivation, d2: Derivation) -> Derivation:
    """From ``A -> B`` and ``B -> C`` derive ``A -> C``."""
    a, _ = _imp(d1.concl)
    return mp(syll(d2, Neg(a)), d1)


@lru_cache(maxsize=None)
def or_intro_right(a: Formula, b: Formula) -> Derivation:
    """``A -> (B | A)``."""
    return hs(bool_ax("B2", a, b), bool_ax("B3", a, b))


@lru_cache(maxsize=None)
def imp_refl(a: Formula) -> Derivation:
    """``A -> A``, which is literally ``~A | A``."""
    return hs(bool_ax("B2", a, a), bool_ax("B1", a))


@lru_cache(maxsize=None)
def lem(a: Formula) -> Derivation:
    """``A | ~A``."""
    return mp(bool_ax("B3", Neg(a), a), imp_refl(a))


def dni(a: Formula) -> Derivation:
    """``A -> ~~A``."""
    return lem(Neg(a))


@lru_cache(maxsize=None)
def dne(a: Formula) -> Derivation:
    """``~~A -> A``."""
    na = Neg(a)
    step = syll(dni(na), a)  # (A | ~A) -> (A | ~~~A)
    return mp(bool_ax("B3", a, Neg(Neg(na))), mp(step, lem(a)))


@lru_cache(maxsize=None)
def k_axiom(a: Formula, b: Formula) -> Derivation:
    """``A -> (B -> A)``."""
    return mp(syll(bool_ax("B3", a, Neg(b)), Neg(a)), bool_ax("B2", a, Neg(b)))


def k_intro(d: Derivation, b: Formula) -> Derivation:
    """From ``A`` derive ``B -> A``."""
    return mp(k_axiom(d.concl, b), d)


def or_elim(dx: Derivation, dy: Derivation) -> Derivation:
    """From ``X -> Z`` and ``Y -> Z`` derive ``(X | Y) -> Z``."""
    x, z = _imp(dx.concl)
    y, z2 = _imp(dy.concl)
    if z is not z2:
        raise ValueError("or_elim needs a common consequent")
    step1 = syll(dy, x)  # (X|Y) -> (X|Z)
    step2 = bool_ax("B3", x, z)  # (X|Z) -> (Z|X)
    step3 = syll(dx, z)  # (Z|X) -> (Z|Z)
    return hs(hs(hs(step1, step2), step3), bool_ax("B1", z))


@lru_cache(maxsize=None)
def permute(a: Formula, b: Formula, c: Formula) -> Derivation:
    """``A | (B | C) -> B | (A | C)``."""
    target = Or(b, Or(a, c))
    from_c = or_intro_right(c, a)  # C -> A | C
    left = syll(from_c, b)  # B | C -> B | (A | C)
    from_a = hs(bool_ax("B2", a, c), or_intro_right(Or(a, c), b))
    assert from_a.concl is Imp(a, target)
    return or_elim(from_a, left)


def permute_imp(d: Derivation) -> Derivation:
    """From ``A -> (B -> C)`` derive ``B -> (A -> C)``."""
    a, bc = _imp(d.concl)
    b, c = _imp(bc)
    return mp(permute(Neg(a), Neg(b), c), d)


@lru_cache(maxsize=None)
def contract(x: Formula, q: Formula) -> Derivation:
    """``X | (X | Q) -> X | Q``."""
    return or_elim(bool_ax("B2", x, q), imp_refl(Or(x, q)))


def mp_under(d_ab: Derivation, d_a: Derivation) -> Derivation:
    """From ``H -> (A -> B)`` and ``H -> A`` derive ``H -> B``."""
    h, ab = _imp(d_ab.concl)
    a, b = _imp(ab)
    swapped = permute_imp(d_ab)  # A -> (H -> B)
    twice = hs(d_a, swapped)  # H -> (H -> B)
    return mp(contract(Neg(h), b), twice)


def ex_falso(a: Formula, y: Formula) -> Derivation:
    """``~A -> (A -> Y)``."""
    return bool_ax("B2", Neg(a), y)


def not_or(db: Derivation, dc: Derivation) -> Derivation:
    """From ``~B`` and ``~C`` derive ``~(B | C)``."""
    b, c = db.concl.body, dc.concl.body
    target = Neg(Or(b, c))
    from_b = mp(ex_falso(b, target), db)
    from_c = mp(ex_falso(c, target), dc)
    return mp(bool_ax("B1", target), or_elim(from_b, from_c))


# structural rules -------------------------------------------------------------------


@deep
def weaken(d: Derivation, extra_hyps: Iterable[Formula]) -> Derivation:
    """Same conclusion, with ``extra_hyps`` added to the hypotheses."""
    for c in sorted(set(extra_hyps) - d.hyps, key=id):
        d = mp(k_intro(d, c), hyp(c))
    return d


@deep
def deduction(d: Derivation, a: Formula) -> Derivation:
    """From ``H |- B`` derive ``H - {A} |- A -> B``."""
    if a not in d.hyps:
        raise HypNotPresent(repr(a))
    memo: dict = {}

    def go(node: Derivation) -> Derivation:
        hit = memo.get(id(node))
        if hit is not None:
            return hit
        if a not in node.hyps:
            r = k_intro(node, a)
        elif node.rule == "hyp":
            r = imp_refl(a)
        elif node.rule == "mp":
            major, minor = node.children
            r = mp_under(go(major), go(minor))
        elif node.rule == "exists":
            (i,) = node.args
            inner = permute_imp(go(node.children[0]))  # P -> (A -> Q)
            r = permute_imp(exists(inner, i))
        else:  # axioms never carry hypotheses
            raise AssertionError(node.rule)
        memo[id(node)] = r
        return r

    return go(d)


# tautologies ------------------------------------------------------------------------


class _Skeleton:
    def __init__(self, a: Formula, atoms: Sequence[Formula]):
        self.atoms: list[Formula] = list(dict.fromkeys(atoms))
        listed = set(self.atoms)
        seen: set = set()
        stack = [a]
        while stack:
            f = stack.pop()
            if f in seen:
                continue
            seen.add(f)
            if f in listed:
                continue
            cls = type(f)
            if cls is Disj:
                stack += [f.right, f.left]
            elif cls is Neg:
                stack.append(f.body)
            else:
                listed.add(f)
                self.atoms.append(f)
        self.listed = listed

    def value(self, f: Formula, v: dict):
        """Truth of ``f`` under a partial valuation (None when undetermined)."""
        if f in self.listed:
            return v.get(f)
        if type(f) is Neg:
            r = self.value(f.body, v)
            return None if r is None else not r
        left = self.value(f.left, v)
        if left is True:
            return True
        right = self.value(f.right, v)
        if right is True:
            return True
        if left is False and right is False:
            return False
        return None

    def prove(self, f: Formula, v: dict) -> Derivation:
        """Derivation of ``f`` (if true) or ``~f`` (if false) from atom hypotheses."""
        if f in self.listed:
            return hyp(f) if v[f] else hyp(Neg(f))
        if type(f) is Neg:
            body = f.body
            if self.value(body, v):
                return mp(dni(body), self.prove(body, v))
            return self.prove(body, v)
        if self.value(f.left, v) is True:
            return mp(bool_ax("B2", f.left, f.right), self.prove(f.left, v))
        if self.value(f.right, v) is True:
            return mp(or_intro_right(f.right, f.left), self.prove(f.right, v))
        return not_or(self.prove(f.left, v), self.prove(f.right, v))


@lru_cache(maxsize=4096)
def _prove_taut_cached(a: Formula, atoms: tuple) -> Derivation:
    sk = _Skeleton(a, atoms)
    for bits in itertools.product((False, True), repeat=len(sk.atoms)):
        v = dict(zip(sk.atoms, bits))
        if sk.value(a, v) is False:
            raise NotATautology(v)

    def build(v: dict, k: int) -> Derivation:
        if sk.value(a, v) is True:
            return sk.prove(a, v)
        p = sk.atoms[k]
        v[p] = True
        pos = build(v, k + 1)
        v[p] = False
        neg = build(v, k + 1)
        del v[p]
        if p not in pos.hyps:
            return pos
        if Neg(p) not in neg.hyps:
            return neg
        case = or_elim(deduction(pos, p), deduction(neg, Neg(p)))
        return mp(case, lem(p))

    return build({}, 0)


@deep
def prove_taut(a: Formula, atoms: Sequence[Formula] = ()) -> Derivation:
    """``|- A`` for a propositional tautology over ``atoms`` (other leaves become atoms too)."""
    return _prove_taut_cached(a, tuple(atoms))


def taut_chain(goal: Formula, premises: Sequence[Derivation], atoms: Sequence[Formula] = ()) -> Derivation:
    """Derive ``goal`` from premises it follows from tautologically."""
    f = goal
    for d in reversed(premises):
        f = Imp(d.concl, f)
    d = prove_taut(f, atoms)
    for p in premises:
        d = mp(d, p)
    return d


def _contra_imp(d: Derivation) -> Derivation:
    """From ``B -> A`` derive ``~A -> ~B``."""
    b, a = _imp(d.concl)
    step = mp(syll(dni(a), Neg(b)), d)  # ~B | ~~A
    return mp(bool_ax("B3", Neg(b), Neg(Neg(a))), step)


def and_intro(da: Derivation, db: Derivation) -> Derivation:
    # A & B is ~(~A | ~B)
    return not_or(mp(dni(da.concl), da), mp(dni(db.concl), db))


def and_left(d: Derivation) -> Derivation:
    a, b = match_and(d.concl)
    out = _contra_imp(bool_ax("B2", Neg(a), Neg(b)))  # ~(~A | ~B) -> ~~A
    return mp(dne(a), mp(out, d))


def and_right(d: Derivation) -> Derivation:
    a, b = match_and(d.concl)
    out = _contra_imp(or_intro_right(Neg(b), Neg(a)))  # ~(~A | ~B) -> ~~B
    return mp(dne(b), mp(out, d))


def iff_mp(d_iff: Derivation, d_a: Derivation) -> Derivation:
    """From ``A <-> B`` and ``A`` derive ``B``."""
    return mp(and_left(d_iff), d_a)


def iff_mpr(d_iff: Derivation, d_b: Derivation) -> Derivation:
    """From ``A <-> B`` and ``B`` derive ``A``."""
    return mp(and_right(d_iff), d_b)


# quantifiers ------------------------------------------------------------------------


def _contrapose(d: Derivation) -> Derivation:
    """From ``A -> B`` derive ``~B -> ~A``."""
    return _contra_imp(d)


def all_elim_imp(a: Formula, t: Term) -> Derivation:
    """``(All i. A) -> A(i::=t)``."""
    body = match_all(a)
    if body is None:
        raise ValueError("not a universal")
    i = fresh_name(a.fv | t.fv, "x")
    opened = instantiate(body, Var(i))
    target = instantiate(body, t)
    s = spec(Neg(opened), i, t)  # ~A(t) -> Ex i. ~A
    return hs(_contra_imp(s), dne(target))


def all_elim(d: Derivation, t: Term) -> Derivation:
    """From ``All i. A`` derive ``A(i::=t)``."""
    return mp(all_elim_imp(d.concl, t), d)


def all_elim_body(d: Derivation, body: Formula, t: Term) -> Derivation:
    return all_elim(d, t)


@lru_cache(maxsize=None)
def not_fls() -> Derivation:
    """``~ 0 IN 0``."""
    empty_all = iff_mp(hf_ax("HF1", ZERO), eq_ax("E1", ZERO))  # All x. ~ x IN 0
    return all_elim(empty_all, ZERO)


def all_intro(d: Derivation, i: str) -> Derivation:
    """From ``H |- A`` with ``i`` not free in ``H`` derive ``H |- All i. A``."""
    a = d.concl
    to_fls = mp(permute_imp(ex_falso(a, FLS)), d)  # ~A -> Fls
    closed = exists(to_fls, i)  # (Ex i. ~A) -> Fls
    return mp(_contra_imp(closed), not_fls())


def all_intro_imp(d: Derivation, i: str) -> Derivation:
    """From ``H |- P -> A`` with ``i`` not free in ``P`` or ``H`` derive ``H |- P -> All i. A``."""
    p, a = _imp(d.concl)
    closed = exists(_contra_imp(d), i)  # (Ex i. ~A) -> ~P
    return hs(dni(p), _contra_imp(closed))


def pre_compose(d_xs: Derivation, u: Formula) -> Derivation:
    """From ``X -> S`` derive ``(S -> U) -> (X -> U)``."""
    x, s_ = _imp(d_xs.concl)
    return mp(permute_imp(bool_ax("B4", Neg(x), s_, u)), d_xs)


def ex_intro(d: Derivation, a: Formula, i: str, t: Term) -> Derivation:
    """From ``A(i::=t)`` derive ``Ex i. A``."""
    return mp(spec(a, i, t), d)


# equality ---------------------------------------------------------------------------


def eq_refl(t: Term) -> Derivation:
    return eq_ax("E1", t)


@lru_cache(maxsize=None)
def eq_sym_imp(x: Term, y: Term) -> Derivation:
    """``x = y -> y = x``."""
    e2 = eq_ax("E2", x, y, x)  # x=y -> (x=x -> y=x)
    return mp(permute_imp(e2), eq_ax("E1", x))


def eq_sym(d: Derivation) -> Derivation:
    e = d.concl
    return mp(eq_sym_imp(e.left, e.right), d)


def eq_trans(d1: Derivation, d2: Derivation) -> Derivation:
    """From ``x = y`` and ``y = z`` derive ``x = z``."""
    x, y = d1.concl.left, d1.concl.right
    z = d2.concl.right
    e2 = eq_ax("E2", y, x, z)  # y=x -> (y=z -> x=z)
    return mp(mp(e2, eq_sym(d1)), d2)


def _term_cong(t: Term, i: str, x: Term, y: Term, dxy: Derivation, memo: dict) -> Derivation:
    """``t(x) = t(y)`` under the hypotheses of ``dxy``."""
    if i not in t.fv:
        return eq_ax("E1", t)
    hit = memo.get(t)
    if hit is not None:
        return hit
    if type(t) is Var:
        r = dxy
    else:
        dl = _term_cong(t.left, i, x, y, dxy, memo)
        dr = _term_cong(t.right, i, x, y, dxy, memo)
        lx, ly = dl.concl.left, dl.concl.right
        rx, ry = dr.concl.left, dr.concl.right
        r = mp(mp(eq_ax("E5", lx, ly, rx, ry), dl), dr)
    memo[t] = r
    return r


def _fm_cong(b: Formula, i: str, x: Term, y: Term, dxy: Derivation, dyx: Derivation, memo: dict):
    """``B(x) -> B(y)`` under the hypotheses of ``dxy``."""
    if i not in b.fv:
        return imp_refl(b)
    key = (b, x)
    hit = memo.get(key)
    if hit is not None:
        return hit
    cls = type(b)
    if cls is Mem:
        ds = _term_cong(b.left, i, x, y, dxy, memo.setdefault("tx", {}))
        dt = _term_cong(b.right, i, x, y, dxy, memo["tx"])
        sx, sy, tx, ty = ds.concl.left, ds.concl.right, dt.concl.left, dt.concl.right
        left = mp(eq_ax("E4", sx, sy, tx), ds)  # sx IN tx -> sy IN tx
        right = mp(eq_ax("E3", tx, ty, sy), dt)  # sy IN tx -> sy IN ty
        r = hs(left, right)
    elif cls is Eq:
        ds = _term_cong(b.left, i, x, y, dxy, memo.setdefault("tx", {}))
        dt = _term_cong(b.right, i, x, y, dxy, memo["tx"])
        sx, sy, tx, ty = ds.concl.left, ds.concl.right, dt.concl.left, dt.concl.right
        imp1 = mp(eq_ax("E2", sx, sy, tx), ds)  # sx=tx -> sy=tx
        imp2 = hs(imp1, eq_sym_imp(sy, tx))  # sx=tx -> tx=sy
        imp3 = mp(permute_imp(eq_ax("E2", tx, sy, ty)), dt)  # tx=sy -> sy=ty
        r = hs(imp2, imp3)
    elif cls is Disj:
        dc = _fm_cong(b.left, i, x, y, dxy, dyx, memo)
        dd = _fm_cong(b.right, i, x, y, dxy, dyx, memo)
        cx, cy = _imp(dc.concl)
        dx_, dy_ = _imp(dd.concl)
        r = hs(
            hs(hs(syll(dd, cx), bool_ax("B3", cx, dy_)), syll(dc, dy_)),
            bool_ax("B3", dy_, cy),
        )
    elif cls is Neg:
        back = _fm_cong(b.body, i, y, x, dyx, dxy, memo.setdefault("rev", {}))
        r = _contra_imp(back)
    else:
        z = fresh_name(b.fv | x.fv | y.fv | {i}, "z")
        inner = instantiate(b.body, Var(z))
        step = _fm_cong(inner, i, x, y, dxy, dyx, memo)  # C(x) -> C(y)
        cy = subst_fm(inner, i, y)
        intro = spec(cy, z, Var(z))  # C(y) -> Ex z. C(y)
        r = exists(hs(step, intro), z)
    memo[key] = r
    return r


def subst_eq(b: Formula, i: str, x: Term, y: Term) -> Derivation:
    """``x = y -> (B(i::=x) -> B(i::=y))``."""
    e = Eq(x, y)
    dxy = hyp(e)
    d = _fm_cong(b, i, x, y, dxy, eq_sym(dxy), {})
    if e in d.hyps:
        return deduction(d, e)
    return k_intro(d, e)
