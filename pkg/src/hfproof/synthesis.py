"""Proof synthesis for ground atoms and true Σ sentences, plus the diagonal construction.

Ground atoms are decided by mutual recursion on term structure:

    z IN 0        never
    z IN x <| y   iff  z IN x  or  z = y          (HF2)
    0 SUBS u      always
    x <| y SUBS u iff  x SUBS u  and  y IN u
    s = t         iff  s SUBS t  and  t SUBS s     (HF1 / HF2 for the converse)

and every answer comes with a derivation of the atom or of its negation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from hfproof._deep import deep
from hfproof.calculus import (
    EMPTY_BASE,
    Derivation,
    InvalidRule,
    bool_ax,
    check,
    eq_ax,
    hf_ax,
    mp,
    spec,
)
from hfproof.coding import canonical_term, enc_fm, enc_tm, quote_fm, subst_code, var_code
from hfproof.derived import (
    _contrapose,
    all_elim,
    all_elim_imp,
    all_intro,
    all_intro_imp,
    and_intro,
    and_left,
    and_right,
    eq_sym_imp,
    ex_falso,
    hs,
    iff_mp,
    iff_mpr,
    imp_refl,
    not_or,
    or_elim,
    or_intro_right,
    permute_imp,
    pre_compose,
    subst_eq,
)
from hfproof.hf_model import HfSet, ack_index, from_ack_index
from hfproof.object_predicates import Built, conj, exists, krp_p
from hfproof.semantics import BudgetExhausted, Evaluator, eval_fm, eval_tm
from hfproof.syntax import (
    ZERO,
    All2,
    And,
    Bound,
    Disj,
    Eats,
    Eq,
    Ex,
    Formula,
    Iff,
    Mem,
    Neg,
    Subs,
    Term,
    Var,
    Zero,
    _mentions_index,
    fresh_name,
    instantiate,
    is_ground,
    match_all2,
    match_and,
    mk_ex,
    subst_fm,
)

__all__ = [
    "NotGround",
    "NotStrictSigma",
    "NotTrue",
    "CapExceeded",
    "BadInterface",
    "StrictSigma",
    "SigmaRejection",
    "GroundAtom",
    "strict_sigma_check",
    "sigma_normalize",
    "prove_ground_atom",
    "prove_strict_sigma",
    "check_sigma_certificate",
    "diag",
    "diag_built",
    "diag_fixpoint_check",
    "godel_sentence",
    "DEFAULT_CAP",
]

DEFAULT_CAP = 1 << 20


class NotGround(ValueError):
    pass


class NotStrictSigma(ValueError):
    def __init__(self, message: str, path=()):
        super().__init__(message)
        self.path = tuple(path)


class NotTrue(ValueError):
    pass


class CapExceeded(RuntimeError):
    pass


class BadInterface(ValueError):
    pass


# strict Σ shape -----------------------------------------------------------------------


@dataclass(frozen=True)
class StrictSigma:
    formula: Formula
    evidence: tuple = ()

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class SigmaRejection:
    path: tuple
    node: object
    reason: str

    def __bool__(self) -> bool:
        return False

    def __str__(self) -> str:
        where = ".".join(map(str, self.path)) or "root"
        return f"not strict Σ at {where}: {self.reason}"


def _is_variable(t: Term) -> bool:
    return type(t) is Var or type(t) is Bound


def strict_sigma_check(a: Formula):
    """Trace of rules (MemI, DisjI, ConjI, ExI, All2I) or a :class:`SigmaRejection`."""
    evidence = []
    seen: dict = {}
    todo = [(a, ())]
    while todo:
        node, path = todo.pop()
        if node in seen:
            evidence.append((path, seen[node]))
            continue
        cls = type(node)
        if cls is Mem:
            if not (_is_variable(node.left) and _is_variable(node.right)):
                return SigmaRejection(path, node, "membership atoms must relate two variables")
            rule = "MemI"
        elif (parts := match_and(node)) is not None:
            rule = "ConjI"
            todo += [(parts[0], path + (0, 0, 0)), (parts[1], path + (0, 1, 0))]
        elif (parts := match_all2(node)) is not None:
            bound, body = parts
            if not _is_variable(bound):
                return SigmaRejection(path, node, "bounded quantifier needs a variable bound")
            if type(bound) is Var and bound.name in body.fv:
                return SigmaRejection(path, node, f"bound variable {bound.name} occurs in the body")
            if type(bound) is Bound and _mentions_index_fm(body, bound.index + 1):
                return SigmaRejection(path, node, "bound variable occurs in the body")
            rule = "All2I"
            todo.append((body, path + (0, 0, 0, 1)))
        elif cls is Disj:
            rule = "DisjI"
            todo += [(node.left, path + (0,)), (node.right, path + (1,))]
        elif cls is Ex:
            rule = "ExI"
            todo.append((node.body, path + (0,)))
        elif cls is Eq:
            return SigmaRejection(path, node, "equality atoms are not strict Σ")
        else:
            return SigmaRejection(path, node, "negation outside a conjunction or bounded quantifier")
        seen[node] = rule
        evidence.append((path, rule))
    return StrictSigma(a, tuple(evidence))


def _mentions_index_fm(a: Formula, k: int) -> bool:
    memo: dict = {}

    def go(x, k):
        key = (x, k)
        if key in memo:
            return memo[key]
        if x.level <= k:
            r = False
        elif type(x) in (Mem, Eq):
            r = _mentions_index(x.left, k) or _mentions_index(x.right, k)
        elif type(x) is Disj:
            r = go(x.left, k) or go(x.right, k)
        elif type(x) is Neg:
            r = go(x.body, k)
        else:
            r = go(x.body, k + 1)
        memo[key] = r
        return r

    return go(a, k)


# normalisation into strict form -------------------------------------------------------

_norm_counter = itertools.count()


def _nfresh() -> str:
    return f"_n{next(_norm_counter)}"


def _conj(parts):
    acc = parts[-1]
    for p in reversed(parts[:-1]):
        acc = And(p, acc)
    return acc


def _same(x: str, y: str) -> Formula:
    """Extensional equality of two variables, in strict form."""
    z = _nfresh()
    if x == y:
        w = _nfresh()  # trivially true: the empty set has no member z with z IN z failing
        return mk_ex(w, All2(z, Var(w), Mem(Var(z), Var(z))))
    return And(All2(z, Var(x), Mem(Var(z), Var(y))), All2(z, Var(y), Mem(Var(z), Var(x))))


def _define(t: Term, defs: list) -> str:
    """A variable standing for ``t``; defining conditions are appended to ``defs``."""
    if type(t) is Var:
        return t.name
    x = _nfresh()
    u = _nfresh()
    if type(t) is Zero:
        defs.append((x, All2(u, Var(x), Mem(Var(u), Var(u)))))
        return x
    if type(t) is not Eats:
        raise NotStrictSigma("bound index inside a term")
    left = _define(t.left, defs)
    right = _define(t.right, defs)
    cond = _conj(
        [
            All2(u, Var(x), Disj(Mem(Var(u), Var(left)), _same(u, right))),
            All2(u, Var(left), Mem(Var(u), Var(x))),
            Mem(Var(right), Var(x)),
        ]
    )
    defs.append((x, cond))
    return x


def _wrap(defs: list, core: Formula) -> Formula:
    for name, cond in reversed(defs):
        core = mk_ex(name, And(cond, core))
    return core


def _norm(a: Formula, path=()) -> Formula:
    cls = type(a)
    if cls is Mem or cls is Eq:
        defs: list = []
        x = _define(a.left, defs)
        y = _define(a.right, defs)
        core = Mem(Var(x), Var(y)) if cls is Mem else _same(x, y)
        return _wrap(defs, core)
    parts = match_and(a)
    if parts is not None:
        return And(_norm(parts[0], path + (0, 0, 0)), _norm(parts[1], path + (0, 1, 0)))
    parts = match_all2(a)
    if parts is not None:
        bound, body = parts
        i = _nfresh()
        inner = _norm(instantiate(body, Var(i)), path + (0, 0, 0, 1))
        if type(bound) is Var and bound.name not in inner.fv:
            return All2(i, bound, inner)
        defs: list = []
        if type(bound) is Var:
            y = _nfresh()
            defs.append((y, _same(y, bound.name)))
            inner = subst_fm(inner, bound.name, Var(y))
            return _wrap(defs, All2(i, bound, inner))
        y = _define(bound, defs)
        return _wrap(defs, All2(i, Var(y), inner))
    if cls is Disj:
        return Disj(_norm(a.left, path + (0,)), _norm(a.right, path + (1,)))
    if cls is Ex:
        i = _nfresh()
        return mk_ex(i, _norm(instantiate(a.body, Var(i)), path + (0,)))
    raise NotStrictSigma("negation outside a conjunction or bounded quantifier", path)


@deep
def sigma_normalize(a: Formula) -> Formula:
    """Expand a positive formula (atoms over arbitrary terms, ``=``, ``&``, ``|``, ``Ex``,
    bounded ``All``) into the strict grammar.  Equality becomes mutual inclusion and
    compound terms are named by extra existentials; the result is equivalent in HF.
    """
    if a.level:
        raise ValueError("formula is not locally closed")
    return _norm(a)


# ground atoms ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroundAtom:
    rel: str  # "Mem", "Eq" or "Subs"
    left: Term
    right: Term

    def formula(self) -> Formula:
        return {"Mem": Mem, "Eq": Eq, "Subs": Subs}[self.rel](self.left, self.right)


def _as_atom(g) -> GroundAtom:
    if isinstance(g, GroundAtom):
        return g
    cls = type(g)
    if cls is Mem or cls is Eq:
        return GroundAtom(cls.__name__, g.left, g.right)
    parts = match_all2(g)
    if parts is not None:
        bound, body = parts
        if type(body) is Mem and body.left is Bound(0) and not _mentions_index(body.right, 0):
            from hfproof.syntax import _shift_down_tm

            return GroundAtom("Subs", bound, _shift_down_tm(body.right))
    raise ValueError("not a membership, equality or inclusion atom")


_Z = Var("z")


class _AtomProver:
    """Memoised mutual recursion; every result is ``(truth, derivation)``."""

    def __init__(self):
        self.memo: dict = {}
        self.lemmas: dict = {}

    # lemmas
    def mem0(self, z: Term) -> Derivation:
        """``~ z IN 0``."""
        key = ("mem0", z)
        if key not in self.lemmas:
            empty_all = iff_mp(hf_ax("HF1", ZERO), eq_ax("E1", ZERO))
            self.lemmas[key] = all_elim(empty_all, z)
        return self.lemmas[key]

    def mem_eats(self, z: Term, x: Term, y: Term) -> Derivation:
        """``z IN x <| y <-> z IN x | z = y``."""
        key = ("memE", z, x, y)
        if key not in self.lemmas:
            t = Eats(x, y)
            every = iff_mp(hf_ax("HF2", t, x, y), eq_ax("E1", t))
            self.lemmas[key] = all_elim(every, z)
        return self.lemmas[key]

    def eq_to_mem(self, z: Term, y: Term, u: Term, d_yu: Derivation) -> Derivation:
        """From ``y IN u`` derive ``z = y -> z IN u``."""
        step = mp(permute_imp(eq_ax("E4", y, z, u)), d_yu)  # y=z -> z IN u
        return hs(eq_sym_imp(z, y), step)

    def subs_refl(self, s: Term) -> Derivation:
        key = ("srefl", s)
        if key not in self.lemmas:
            self.lemmas[key] = all_intro(imp_refl(Mem(_Z, s)), "z")
        return self.lemmas[key]

    def eq_to_subs(self, s: Term, t: Term) -> Derivation:
        """``s = t -> s SUBS t``."""
        return all_intro_imp(eq_ax("E3", s, t, _Z), "z")

    # the recursion
    def prove(self, rel: str, s: Term, t: Term):
        key = (rel, s, t)
        hit = self.memo.get(key)
        if hit is None:
            hit = getattr(self, "_" + rel.lower())(s, t)
            self.memo[key] = hit
        return hit

    def _mem(self, z: Term, t: Term):
        if type(t) is Zero:
            return False, self.mem0(z)
        x, y = t.left, t.right
        iff = self.mem_eats(z, x, y)
        ok, dm = self.prove("Mem", z, x)
        if ok:
            return True, iff_mpr(iff, mp(bool_ax("B2", Mem(z, x), Eq(z, y)), dm))
        ok, de = self.prove("Eq", z, y)
        if ok:
            return True, iff_mpr(iff, mp(or_intro_right(Eq(z, y), Mem(z, x)), de))
        return False, mp(_contrapose(and_left(iff)), not_or(dm, de))

    def _subs(self, s: Term, u: Term):
        if type(s) is Zero:
            d = mp(ex_falso(Mem(_Z, ZERO), Mem(_Z, u)), self.mem0(_Z))
            return True, all_intro(d, "z")
        x, y = s.left, s.right
        ok_x, dx = self.prove("Subs", x, u)
        ok_y, dy = self.prove("Mem", y, u)
        goal = Subs(s, u)
        if ok_x and ok_y:
            from_x = all_elim(dx, _Z)  # z IN x -> z IN u
            from_y = self.eq_to_mem(_Z, y, u, dy)
            split = and_left(self.mem_eats(_Z, x, y))
            return True, all_intro(hs(split, or_elim(from_x, from_y)), "z")
        every = all_elim_imp(goal, y if not ok_y else _Z)  # goal -> (w IN s -> w IN u)
        if not ok_y:
            yy = self.mem_eats(y, x, y)
            y_in = iff_mpr(yy, mp(or_intro_right(Eq(y, y), Mem(y, x)), eq_ax("E1", y)))
            to_y = mp(permute_imp(every), y_in)  # goal -> y IN u
            return False, mp(_contrapose(to_y), dy)
        into = hs(bool_ax("B2", Mem(_Z, x), Eq(_Z, y)), and_right(self.mem_eats(_Z, x, y)))
        narrowed = hs(every, pre_compose(into, Mem(_Z, u)))  # goal -> (z IN x -> z IN u)
        to_x = all_intro_imp(narrowed, "z")  # goal -> x SUBS u
        return False, mp(_contrapose(to_x), dx)

    def _eq(self, s: Term, t: Term):
        ok_st, d_st = self.prove("Subs", s, t)
        if not ok_st:
            return False, mp(_contrapose(self.eq_to_subs(s, t)), d_st)
        if type(t) is Zero:
            u = Var("x")
            back = _contrapose(all_elim(d_st, u))  # ~ x IN 0 -> ~ x IN s
            none = all_intro(mp(back, self.mem0(u)), "x")
            return True, iff_mpr(hf_ax("HF1", s), none)
        x, y = t.left, t.right
        ok_x, d_x = self.prove("Subs", x, s)
        ok_y, d_y = self.prove("Mem", y, s)
        if ok_x and ok_y:
            u = Var("u")
            f1 = hs(all_elim(d_st, u), and_left(self.mem_eats(u, x, y)))
            f2 = or_elim(all_elim(d_x, u), self.eq_to_mem(u, y, s, d_y))
            every = all_intro(and_intro(f1, f2), "u")
            return True, iff_mpr(hf_ax("HF2", s, x, y), every)
        ok_ts, d_ts = self.prove("Subs", t, s)
        assert not ok_ts
        to_ts = hs(eq_sym_imp(s, t), self.eq_to_subs(t, s))
        return False, mp(_contrapose(to_ts), d_ts)


_PROVER: _AtomProver | None = None


def _prover() -> _AtomProver:
    global _PROVER
    if _PROVER is None or len(_PROVER.memo) > 200_000:
        _PROVER = _AtomProver()
    return _PROVER


@deep
def prove_ground_atom(g) -> tuple[bool, Derivation]:
    """Decide a ground ``IN``/``=``/``SUBS`` atom; the derivation proves it or its negation."""
    atom = _as_atom(g)
    for t in (atom.left, atom.right):
        if not is_ground(t) or t.level:
            raise NotGround(f"{t!r} is not a ground term")
    return _prover().prove(atom.rel, atom.left, atom.right)


# Σ sentences ------------------------------------------------------------------------------


class _SigmaProver:
    def __init__(self, cap: int):
        self.cap = cap
        self.memo: dict = {}
        self.truths: dict = {}
        self.atoms = _prover()
        self.names = itertools.count()

    def fresh(self) -> str:
        return f"w{next(self.names)}"

    def budgets(self):
        b = min(256, self.cap)
        while True:
            yield b
            if b >= self.cap:
                return
            b = min(b * 16, self.cap)

    def truth(self, a: Formula, budget: int | None = None):
        """True or False; with ``budget`` also None when that search was inconclusive."""
        hit = self.truths.get(a)
        if hit is not None:
            return hit
        for b in self.budgets() if budget is None else (budget,):
            r = eval_fm({}, a, budget=b)
            if not isinstance(r, BudgetExhausted):
                self.truths[a] = r
                return r
        if budget is not None:
            return None
        raise CapExceeded(f"could not decide a subformula within {self.cap} sets")

    def prove(self, a: Formula, path=()) -> Derivation:
        hit = self.memo.get(a)
        if hit is None:
            hit = self._prove(a, path)
            self.memo[a] = hit
        return hit

    def _prove(self, a: Formula, path) -> Derivation:
        cls = type(a)
        if cls is Mem or cls is Eq:
            ok, d = self.atoms.prove(cls.__name__, a.left, a.right)
            if not ok:
                raise NotTrue(f"false atom {a!r}")
            return d
        if cls is Neg and type(a.body) in (Mem, Eq):
            ok, d = self.atoms.prove(type(a.body).__name__, a.body.left, a.body.right)
            if ok:
                raise NotTrue(f"true atom under negation {a.body!r}")
            return d
        parts = match_and(a)
        if parts is not None:
            return and_intro(self.prove(parts[0], path + (0, 0, 0)), self.prove(parts[1], path + (0, 1, 0)))
        parts = match_all2(a)
        if parts is not None:
            return self._bounded(a, parts[0], parts[1], path)
        if cls is Disj:
            # deepen both sides together so a hopeless side cannot stall the other
            for b in self.budgets():
                if self.truth(a.left, b):
                    return mp(bool_ax("B2", a.left, a.right), self.prove(a.left, path + (0,)))
                if self.truth(a.right, b):
                    return mp(or_intro_right(a.right, a.left), self.prove(a.right, path + (1,)))
                if self.truths.get(a.left) is False and self.truths.get(a.right) is False:
                    raise NotTrue("neither disjunct holds")
            raise CapExceeded(f"no disjunct settled within {self.cap} sets")
        if cls is Ex:
            return self._exists(a, path)
        raise NotStrictSigma("negation outside a conjunction or bounded quantifier", path)

    def _exists(self, a: Ex, path) -> Derivation:
        ev = Evaluator({}, self.cap)
        dom = ev.domain(a.body, ())
        if dom is not None:
            # complete: every witness lies in the domain
            pool = [v for v in dom if ack_index(v) < self.cap]
        else:
            pool = list(ev.candidates(a.body, ()))
        settled: set = set()
        done = 0
        for b in self.budgets():
            if dom is None:
                pool += [from_ack_index(n) for n in range(done, b)]
                done = b
            for v in dict.fromkeys(pool):
                if v in settled:
                    continue
                t = canonical_term(v)
                inst = instantiate(a.body, t)
                r = self.truth(inst, b)
                if r is True:
                    i = self.fresh()
                    opened = instantiate(a.body, Var(i))
                    return mp(spec(opened, i, t), self.prove(inst, path + (0,)))
                if r is False:
                    settled.add(v)
            if dom is not None and settled >= set(pool):
                break
        if dom is not None:
            raise NotTrue("no witness in the finite domain")
        raise CapExceeded(f"no witness below Ackermann index {self.cap}")

    def _bounded(self, a: Formula, bound: Term, body: Formula, path) -> Derivation:
        """``All z. z IN t -> B(z)`` by splitting ``z IN t`` along the build of ``t``."""
        if not is_ground(bound) or bound.level:
            raise NotGround("bounded quantifier over a non-ground term")
        z = self.fresh()
        Z = Var(z)
        target = instantiate(body, Z)
        per_value: dict = {}

        def from_eq(y: Term) -> Derivation:
            # z = y -> B(z)
            value = eval_tm({}, y)
            c = canonical_term(value)
            hit = per_value.get(c)
            if hit is None:
                dc = self.prove(instantiate(body, c), path + (0, 0, 0, 1))
                conv = subst_eq(target, z, c, Z)  # c = z -> (B(c) -> B(z))
                hit = hs(eq_sym_imp(Z, c), mp(permute_imp(conv), dc))  # z = c -> B(z)
                per_value[c] = hit
            if y is c:
                return hit
            ok, dyc = self.atoms.prove("Eq", y, c)
            assert ok
            # z = y -> z = c
            e2 = mp(permute_imp(eq_ax("E2", y, Z, c)), dyc)  # y = z -> z = c
            return hs(hs(eq_sym_imp(Z, y), e2), hit)

        def split(t: Term) -> Derivation:
            # z IN t -> B(z)
            if type(t) is Zero:
                return mp(ex_falso(Mem(Z, ZERO), target), self.atoms.mem0(Z))
            cases = or_elim(split(t.left), from_eq(t.right))
            return hs(and_left(self.atoms.mem_eats(Z, t.left, t.right)), cases)

        d = all_intro(split(bound), z)
        assert d.concl is a, "bounded quantifier reassembly mismatch"
        return d


@deep
def prove_strict_sigma(a: Formula, cap: int = DEFAULT_CAP) -> Derivation:
    """``|- A`` for a true ground Σ sentence.

    Accepted shapes: atoms ``IN``/``=`` over ground terms and their negations,
    ``&``, ``|``, ``Ex`` and ``All`` bounded by a term.  Strict Σ sentences are
    a special case.
    """
    if a.fv or a.level:
        raise NotGround("Σ synthesis needs a sentence without free variables")
    prover = _SigmaProver(cap)
    if prover.truth(a) is not True:
        raise NotTrue("the evaluator refutes the sentence")
    return prover.prove(a)


def check_sigma_certificate(a: Formula, b: Formula, d: Derivation) -> bool:
    """``B`` is strict Σ, uses no new free names and ``d`` proves ``A <-> B`` outright."""
    if not strict_sigma_check(b):
        return False
    if not b.fv <= a.fv:
        return False
    try:
        j = check(d, EMPTY_BASE)
    except (InvalidRule, ValueError):
        return False
    return not j.hyps and j.concl is Iff(a, b)


# diagonalisation ---------------------------------------------------------------------------


def diag_built(alpha: Formula, i: str) -> tuple[Built, Formula]:
    """``(beta, delta)``: beta with its witness slots, and delta = beta(i::=quote(beta))."""
    if alpha.level:
        raise ValueError("formula is not locally closed")
    j = fresh_name(alpha.fv | {i}, "j")
    krp = krp_p("v_", "x_", "y_").instantiate(
        {"v_": canonical_term(var_code(i)), "x_": Var(i), "y_": Var(j)}
    )
    vcode = var_code(i)

    def witness(env):
        x = env[i]
        return subst_code(vcode, enc_tm(canonical_term(x)), x)

    beta = exists(j, conj(krp, subst_fm(alpha, i, Var(j))), witness)
    delta = subst_fm(beta.formula, i, quote_fm(beta.formula))
    return beta, delta


@deep
def diag(alpha: Formula, i: str) -> Formula:
    """Fixpoint formula delta with free names those of alpha minus ``i``."""
    return diag_built(alpha, i)[1]


@deep
def diag_fixpoint_check(alpha: Formula, i: str, env: Mapping[str, HfSet] | None = None, budget: int = 256):
    """Evaluate delta (witness-guided) and alpha(i::=quote(delta)); returns both outcomes."""
    beta, delta = diag_built(alpha, i)
    env = dict(env or {})
    slot_env = dict(env)
    slot_env[i] = enc_fm(beta.formula)
    hints = beta.hints(slot_env)
    left = eval_fm(env, delta, budget, hints, strict_hints=True)
    right = eval_fm(env, subst_fm(alpha, i, quote_fm(delta)), budget)
    return left, right


@deep
def godel_sentence(pfp: Formula, i: str) -> Formula:
    if pfp.fv != frozenset({i}):
        raise BadInterface(f"provability formula must have exactly the free name {i}")
    delta = diag(Neg(pfp), i)
    assert is_ground(delta)
    return delta
