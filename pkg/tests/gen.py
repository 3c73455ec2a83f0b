"""Random terms, formulas, environments and derivations for the test suite."""

from __future__ import annotations

import random

from hfproof import calculus as K
from hfproof import derived as D
from hfproof.hf_model import from_ack_index
from hfproof.syntax import (
    ZERO,
    All2,
    And,
    Disj,
    Eats,
    Eq,
    Formula,
    Imp,
    Mem,
    Neg,
    Term,
    Var,
    match_and,
    match_imp,
    mk_ex,
    subst_fm,
)

NAMES = ("x", "y", "z", "w")


def term(rng: random.Random, depth: int = 2, names=NAMES) -> Term:
    roll = rng.random()
    if depth <= 0 or roll < 0.3:
        return ZERO if not names or rng.random() < 0.35 else Var(rng.choice(names))
    return Eats(term(rng, depth - 1, names), term(rng, depth - 1, names))


def atom(rng: random.Random, depth: int = 2, names=NAMES) -> Formula:
    rel = Mem if rng.random() < 0.6 else Eq
    return rel(term(rng, depth, names), term(rng, depth, names))


def formula(rng: random.Random, size: int = 8, names=NAMES, bounded: bool = False) -> Formula:
    """A formula with at most ``size`` nodes.

    With ``bounded`` every quantifier is guarded by membership in a term, so
    the evaluator always has a finite witness domain.
    """
    if size <= 1:
        return atom(rng, 1, names)
    roll = rng.random()
    if roll < 0.2:
        return Neg(formula(rng, size - 1, names, bounded))
    if roll < 0.55:
        k = rng.randint(1, size - 2) if size > 2 else 1
        conn = rng.choice((Disj, And, Imp))
        return conn(formula(rng, k, names, bounded), formula(rng, max(1, size - 1 - k), names, bounded))
    if roll < 0.8:
        i = rng.choice(names)
        body = formula(rng, size - 2 if bounded else size - 1, names, bounded)
        if bounded:
            bound = term(rng, 1, tuple(n for n in names if n != i) or ("y",))
            return All2(i, bound, body) if rng.random() < 0.5 else mk_ex(i, And(Mem(Var(i), bound), body))
        return mk_ex(i, body)
    return atom(rng, 2, names)


def fm_size(a: Formula) -> int:
    cls = type(a)
    if cls is Neg:
        return 1 + fm_size(a.body)
    if cls is Disj:
        return 1 + fm_size(a.left) + fm_size(a.right)
    if cls is Mem or cls is Eq:
        return 1
    return 1 + fm_size(a.body)


def env(rng: random.Random, names=NAMES, limit: int = 64) -> dict:
    return {n: from_ack_index(rng.randrange(limit)) for n in names}


def qf_formula(rng: random.Random, size: int = 4, names=NAMES) -> Formula:
    if size <= 1 or rng.random() < 0.3:
        return atom(rng, 1, names)
    if rng.random() < 0.3:
        return Neg(qf_formula(rng, size - 1, names))
    return Disj(qf_formula(rng, size // 2, names), qf_formula(rng, size - size // 2 - 1, names))


# axiom instances ---------------------------------------------------------------------


def axiom_instances(rng: random.Random, count: int) -> list[Formula]:
    """Instances of every schema family, round robin."""
    out: list[Formula] = []
    kinds = ["B", "E", "HF", "Special", "Ind"]
    while len(out) < count:
        kind = kinds[len(out) % len(kinds)]
        if kind == "B":
            schema = rng.choice(list(K.BOOL_SCHEMAS))
            parts = [formula(rng, 3, bounded=True) for _ in range(K.BOOL_SCHEMAS[schema])]
            out.append(K.axiom_instance(schema, parts))
        elif kind == "E":
            schema = rng.choice(list(K.EQ_SCHEMAS))
            parts = [term(rng, 2) for _ in range(K.EQ_SCHEMAS[schema])]
            out.append(K.axiom_instance(schema, parts))
        elif kind == "HF":
            schema = rng.choice(list(K.HF_SCHEMAS))
            parts = [term(rng, 2) for _ in range(K.HF_SCHEMAS[schema])]
            out.append(K.axiom_instance(schema, parts))
        elif kind == "Special":
            i = rng.choice(NAMES)
            out.append(K.special(formula(rng, 4, bounded=True), i, term(rng, 2)))
        else:
            a = qf_formula(rng, 3, ("x", "y"))
            out.append(K.induction(a, "x", "v"))
    return out


# derivations -------------------------------------------------------------------------


class DerivationFuzzer:
    """Grows a pool of checked derivations by applying random rules to earlier ones."""

    def __init__(self, rng: random.Random, hyp: Formula | None = None):
        self.rng = rng
        self.hyp = hyp
        self.pool: list = []
        self._seed_pool()

    def _seed_pool(self):
        for _ in range(6):
            self.pool.append(self.axiom())
        if self.hyp is not None:
            self.pool.append(K.hyp(self.hyp))

    def axiom(self):
        rng = self.rng
        roll = rng.random()
        if roll < 0.35:
            schema = rng.choice(list(K.BOOL_SCHEMAS))
            return K.bool_ax(schema, *[formula(rng, 3, bounded=True) for _ in range(K.BOOL_SCHEMAS[schema])])
        if roll < 0.6:
            schema = rng.choice(list(K.EQ_SCHEMAS))
            return K.eq_ax(schema, *[term(rng, 1) for _ in range(K.EQ_SCHEMAS[schema])])
        if roll < 0.75:
            schema = rng.choice(list(K.HF_SCHEMAS))
            return K.hf_ax(schema, *[term(rng, 1) for _ in range(K.HF_SCHEMAS[schema])])
        if roll < 0.9:
            return K.spec(formula(rng, 3, bounded=True), rng.choice(NAMES), term(rng, 1))
        return D.imp_refl(formula(rng, 3, bounded=True))

    def _pick(self):
        # favour recent nodes so that chains get deep
        n = len(self.pool)
        k = min(n - 1, int(self.rng.expovariate(0.25)))
        return self.pool[n - 1 - k]

    def step(self):
        rng = self.rng
        a = self._pick()
        b = self._pick()
        if self.hyp is not None and rng.random() < 0.4:
            # keep the marked hypothesis flowing into new nodes
            carriers = [d for d in self.pool[-40:] if self.hyp in d.hyps] or [K.hyp(self.hyp)]
            a = rng.choice(carriers)
        roll = rng.random()
        try:
            if roll < 0.12:
                r = self.axiom()
            elif roll < 0.3:
                r = self._mp(a)
            elif roll < 0.38:
                r = D.and_intro(a, b)
            elif roll < 0.44:
                r = D.k_intro(a, formula(rng, 2, bounded=True))
            elif roll < 0.5:
                r = D.dni(a.concl) if rng.random() < 0.5 else K.mp(D.dni(a.concl), a)
            elif roll < 0.58:
                r = self._hs(a)
            elif roll < 0.66:
                r = self._exists(a)
            elif roll < 0.72:
                r = D.ex_intro(a, a.concl, rng.choice(NAMES), Var(rng.choice(NAMES)))
            elif roll < 0.78:
                r = self._and_elim(a)
            elif roll < 0.84:
                r = D.eq_sym(a) if type(a.concl) is Eq else D.eq_refl(term(rng, 2))
            elif roll < 0.9:
                r = D.lem(formula(rng, 3, bounded=True))
            else:
                r = self._or_elim(a, b)
        except (ValueError, D.HypNotPresent):
            return None
        if r is not None:
            self.pool.append(r)
        return r

    def _mp(self, a):
        parts = match_imp(a.concl)
        if parts is None:
            return None
        for cand in reversed(self.pool):
            if cand.concl is parts[0]:
                return K.mp(a, cand)
        return None

    def _hs(self, a):
        pa = match_imp(a.concl)
        if pa is None:
            return None
        for cand in reversed(self.pool):
            pc = match_imp(cand.concl)
            if pc is not None and pc[0] is pa[1]:
                return D.hs(a, cand)
        return None

    def _exists(self, a):
        parts = match_imp(a.concl)
        if parts is None:
            return None
        hyp_fv = set().union(*(h.fv for h in a.hyps)) if a.hyps else set()
        for i in NAMES:
            if i not in parts[1].fv and i not in hyp_fv:
                return K.exists(a, i)
        return None

    def _and_elim(self, a):
        if match_and(a.concl) is None:
            return None
        return D.and_left(a) if self.rng.random() < 0.5 else D.and_right(a)

    def _or_elim(self, a, b):
        pa, pb = match_imp(a.concl), match_imp(b.concl)
        if pa is None or pb is None or pa[1] is not pb[1]:
            return None
        return D.or_elim(a, b)

    def grow(self, steps: int):
        for _ in range(steps):
            self.step()
        return self.pool


def ground(a: Formula, value_terms: dict) -> Formula:
    for n, t in value_terms.items():
        a = subst_fm(a, n, t)
    return a


# Σ sentences ---------------------------------------------------------------------------


def sigma_sentence(rng: random.Random, size: int = 6, scope: tuple = (), open_ex: int = 0) -> Formula:
    """A ground positive sentence: atoms (maybe negated), ``&``, ``|``, ``Ex`` and ``All2``.

    At most two unguarded existentials are nested, which keeps blind witness
    search cheap; the others carry a ``v IN t`` guard.
    """
    if size <= 1:
        a = atom(rng, 2, scope)
        return Neg(a) if rng.random() < 0.25 else a
    roll = rng.random()
    if roll < 0.3:
        k = rng.randint(1, size - 2) if size > 2 else 1
        conn = And if rng.random() < 0.5 else Disj
        left = sigma_sentence(rng, k, scope, open_ex)
        return conn(left, sigma_sentence(rng, max(1, size - 1 - k), scope, open_ex))
    i = f"v{len(scope)}"
    inner = scope + (i,)
    if roll < 0.65:
        if open_ex < 2 and rng.random() < 0.5:
            return mk_ex(i, sigma_sentence(rng, size - 1, inner, open_ex + 1))
        guard = Mem(Var(i), term(rng, 2, scope))
        return mk_ex(i, And(guard, sigma_sentence(rng, size - 1, inner, open_ex)))
    return All2(i, term(rng, 2, scope), sigma_sentence(rng, size - 1, inner, open_ex))
