"""Object-level predicates about codes, written as positive Σ formulas.

Each predicate is one unbounded existential over a witness set (or two) whose
entries are checked by bounded quantifiers.  Constructors return a
:class:`PredicateFormula` pairing the formula with the meta-level relation it
defines and with *slots*: paths of the existential nodes together with a
function computing a good witness from the parameter values.  Those witnesses
become evaluator hints, which is how instances are checked quickly.

Inequality of ordinals is written ``a IN b | b IN a`` so no predicate needs a
negated atom.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Mapping, Sequence

from hfproof._deep import deep
from hfproof.coding import (
    Q_DISJ,
    Q_EATS,
    Q_EQ,
    Q_EX,
    Q_IND,
    Q_MEM,
    Q_NEG,
    NotACode,
    abst_code,
    abst_code_tm,
    canonical_term,
    dec_tm,
    enc_tm,
    make_form,
    pair_term,
    subst_code,
    subst_code_tm,
    tuple3,
    var_codes_in,
)
from hfproof.hf_model import (
    HfSet,
    NotAPair,
    NotASequence,
    empty,
    hf_set,
    is_ordinal,
    ordinal,
    ordinal_value,
    pair,
    seq_to_list,
    unpair,
)
from hfproof.semantics import DEFAULT_BUDGET, eval_fm, eval_tm
from hfproof.syntax import (
    ZERO,
    And,
    All2,
    Disj,
    Eats,
    Eq,
    Formula,
    Mem,
    Term,
    Var,
    mk_ex,
    subst_many,
)

__all__ = [
    "FreshnessExhausted",
    "PredicateFormula",
    "Built",
    "conj",
    "disj",
    "exists",
    "lstseq_p",
    "term_p",
    "abst_term_p",
    "subst_term_p",
    "abst_form_p",
    "subst_form_p",
    "make_form_p",
    "q_p",
    "krp_p",
    "PREDICATES",
]

_EMPTY = empty()
_counter = itertools.count()
_FRESH_TRIES = 10_000


class FreshnessExhausted(RuntimeError):
    pass


def _fresh(avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    for _ in range(_FRESH_TRIES):
        name = f"_{next(_counter)}"
        if name not in avoid:
            return name
    raise FreshnessExhausted("could not find an unused internal name")


# formulas with witness slots -------------------------------------------------------

Slot = tuple  # (path, name, fn)


class Built:
    """A formula plus the witness slots of some of its existentials."""

    __slots__ = ("formula", "slots")

    def __init__(self, formula: Formula, slots: Sequence[Slot] = ()):
        self.formula = formula
        self.slots = tuple(slots)

    def hints(self, env: Mapping[str, HfSet]) -> dict:
        """Hint dictionary for the evaluator, computed from the free-variable values."""
        vals = dict(env)
        out = {}
        for path, name, fn in self.slots:
            try:
                v = fn(vals)
            except (NotACode, NotAPair, NotASequence, KeyError):
                v = _EMPTY
            vals[name] = v[0] if isinstance(v, list) else v
            out[path] = v
        return out


def _built(x) -> Built:
    return x if isinstance(x, Built) else Built(x)


def _prefixed(slots, prefix):
    return [(prefix + p, n, f) for p, n, f in slots]


def conj(*parts) -> Built:
    parts = [_built(p) for p in parts]
    acc = parts[-1]
    for p in reversed(parts[:-1]):
        acc = Built(
            And(p.formula, acc.formula),
            _prefixed(p.slots, (0, 0, 0)) + _prefixed(acc.slots, (0, 1, 0)),
        )
    return acc


def disj(*parts) -> Built:
    parts = [_built(p) for p in parts]
    acc = parts[-1]
    for p in reversed(parts[:-1]):
        acc = Built(Disj(p.formula, acc.formula), _prefixed(p.slots, (0,)) + _prefixed(acc.slots, (1,)))
    return acc


def exists(name: str, body, witness: Callable | None = None) -> Built:
    body = _built(body)
    own = [((), name, witness)] if witness is not None else []
    return Built(mk_ex(name, body.formula), own + _prefixed(body.slots, (0,)))


class PredicateFormula(Built):
    """A predicate formula over ``params`` with the meta relation it expresses."""

    __slots__ = ("name", "params", "meta_oracle")

    def __init__(self, name: str, built: Built, params: Sequence[str], meta_oracle: Callable[..., bool]):
        super().__init__(built.formula, built.slots)
        self.name = name
        self.params = tuple(params)
        self.meta_oracle = meta_oracle
        extra = self.formula.fv - set(self.params)
        if extra:
            raise ValueError(f"{name}: unexpected free names {sorted(extra)}")

    def meta(self, *values: HfSet) -> bool:
        return bool(self.meta_oracle(*values))

    def env(self, *values: HfSet) -> dict:
        if len(values) != len(self.params):
            raise TypeError(f"{self.name} takes {len(self.params)} arguments")
        return dict(zip(self.params, values))

    def evaluate(self, *values: HfSet, budget: int = DEFAULT_BUDGET, strict: bool = True, hints=None):
        """Evaluate with meta-computed witnesses; ``strict`` refutes from them alone."""
        env = self.env(*values)
        if hints is None:
            hints = self.hints(env)
        return eval_fm(env, self.formula, budget, hints, strict_hints=strict)

    def instantiate(self, mapping: Mapping[str, Term]) -> Built:
        """Substitute terms for parameters, keeping the slots usable."""
        formula = subst_many(self.formula, mapping)

        def wrap(fn):
            def inner(env):
                local = dict(env)
                for p, t in mapping.items():
                    local[p] = eval_tm(env, t)
                return fn(local)

            return inner

        return Built(formula, [(p, n, wrap(f)) for p, n, f in self.slots])

    def __repr__(self) -> str:
        return f"<{self.name}({', '.join(self.params)})>"


# small formula builders -----------------------------------------------------------

_TAGS = {k: canonical_term(ordinal(k)) for k in range(1, 8)}


def _pr(a: Term, b: Term) -> Term:
    return pair_term(a, b)


def _tp(a: Term, b: Term, c: Term) -> Term:
    return pair_term(a, pair_term(b, c))


def _ex(names: Sequence[str], body) -> Built:
    acc = _built(body)
    for n in reversed(names):
        acc = exists(n, acc)
    return acc


def _all_in(name: str, bound: Term, body: Formula) -> Formula:
    return All2(name, bound, body)


def _ex_in(name: str, bound: Term, body: Formula) -> Formula:
    return mk_ex(name, And(Mem(Var(name), bound), body))


def _ord(x: Term) -> Formula:
    """``x`` is an ordinal: every member is 0 or the successor of another member."""
    y, p = _fresh(x.fv), _fresh(x.fv)
    step = Disj(Eq(Var(y), ZERO), _ex_in(p, x, Eq(Var(y), Eats(Var(p), Var(p)))))
    return _all_in(y, x, step)


def _nonzero(x: Term) -> Formula:
    z = _fresh(x.fv)
    return _ex_in(z, x, Eq(Var(z), ZERO))


def _ord_ne(a: Term, b: Term) -> Formula:
    return Disj(Mem(a, b), Mem(b, a))


def _f(x) -> Formula:
    return x.formula if isinstance(x, Built) else x


# rewriting witnesses: entries <a, r> or <a, k, r> ------------------------------------


def _entry(a: Term, k: Term | None, r: Term) -> Term:
    return _pr(a, r) if k is None else _tp(a, k, r)


def _term_step(a: Term, k: Term | None, r: Term, wt: Term, v: Term, hit: Formula) -> Formula:
    """One term entry of an abstraction (``k`` given) or substitution witness."""
    j, p, q, p2, q2 = (_fresh(()) for _ in range(5))
    P, Q, P2, Q2 = Var(p), Var(q), Var(p2), Var(q2)
    eats_case = _ex(
        [p, q, p2, q2],
        conj(
            Eq(a, _tp(_TAGS[2], P, Q)),
            Eq(r, _tp(_TAGS[2], P2, Q2)),
            Mem(_entry(P, k, P2), wt),
            Mem(_entry(Q, k, Q2), wt),
        ),
    )
    return _f(
        disj(
            And(Eq(a, v), hit),
            conj(_ord(a), _ord_ne(a, v), Eq(r, a)),
            And(_f(_ex([j], And(Eq(a, _pr(_TAGS[1], Var(j))), _ord(Var(j))))), Eq(r, a)),
            eats_case,
        )
    )


def _form_step(a: Term, k: Term | None, r: Term, wt: Term, wf: Term) -> Formula:
    p, q, p2, q2 = (_fresh(()) for _ in range(4))
    P, Q, P2, Q2 = Var(p), Var(q), Var(p2), Var(q2)

    def shape(tag, w):
        return conj(Eq(a, _tp(_TAGS[tag], P, Q)), Eq(r, _tp(_TAGS[tag], P2, Q2)))

    atoms = _ex(
        [p, q, p2, q2],
        conj(disj(shape(3, wt), shape(4, wt)), Mem(_entry(P, k, P2), wt), Mem(_entry(Q, k, Q2), wt)),
    )
    disj_case = _ex([p, q, p2, q2], conj(shape(5, wf), Mem(_entry(P, k, P2), wf), Mem(_entry(Q, k, Q2), wf)))
    neg_case = _ex([p, p2], conj(Eq(a, _pr(_TAGS[6], P)), Eq(r, _pr(_TAGS[6], P2)), Mem(_entry(P, k, P2), wf)))
    deeper = None if k is None else Eats(k, k)
    ex_case = _ex([p, p2], conj(Eq(a, _pr(_TAGS[7], P)), Eq(r, _pr(_TAGS[7], P2)), Mem(_entry(P, deeper, P2), wf)))
    return _f(disj(atoms, disj_case, neg_case, ex_case))


def _all_entries(w: Term, with_depth: bool, step: Callable[[Term, Term | None, Term], Formula]) -> Formula:
    e, a, k, r = (_fresh(w.fv) for _ in range(4))
    K = Var(k) if with_depth else None
    names = [a, k, r] if with_depth else [a, r]
    inner = _f(_ex(names, And(Eq(Var(e), _entry(Var(a), K, Var(r))), step(Var(a), K, Var(r)))))
    return _all_in(e, w, inner)


# meta-level witnesses ---------------------------------------------------------------


def _rewrite_witness(root: HfSet, depth: int | None, on_var: Callable, formula: bool):
    """Entries for every reachable sub-code of ``root``; malformed parts are skipped."""
    terms: dict = {}
    forms: dict = {}

    def key(c, d):
        return (c, d)

    def ent(c, d, r):
        return pair(c, r) if d is None else tuple3(c, ordinal(d), r)

    @deep
    def term(c, d):
        hit = terms.get(key(c, d))
        if hit is not None:
            return hit[0]
        if c is _EMPTY:
            r = c
        elif is_ordinal(c):
            r = on_var(c, d)
        else:
            tag, rest = unpair(c)
            if tag is Q_IND:
                if not is_ordinal(rest):
                    raise NotACode((), c)
                r = c
            elif tag is Q_EATS:
                x, y = unpair(rest)
                r = tuple3(Q_EATS, term(x, d), term(y, d))
            else:
                raise NotACode((), c)
        terms[key(c, d)] = (r, ent(c, d, r))
        return r

    @deep
    def form(c, d):
        hit = forms.get(key(c, d))
        if hit is not None:
            return hit[0]
        if is_ordinal(c):
            raise NotACode((), c)
        tag, rest = unpair(c)
        if tag is Q_MEM or tag is Q_EQ:
            x, y = unpair(rest)
            r = tuple3(tag, term(x, d), term(y, d))
        elif tag is Q_DISJ:
            x, y = unpair(rest)
            r = tuple3(tag, form(x, d), form(y, d))
        elif tag is Q_NEG:
            r = pair(tag, form(rest, d))
        elif tag is Q_EX:
            r = pair(tag, form(rest, None if d is None else d + 1))
        else:
            raise NotACode((), c)
        forms[key(c, d)] = (r, ent(c, d, r))
        return r

    try:
        (form if formula else term)(root, depth)
    except (NotACode, NotAPair):
        pass
    wt = hf_set(e for _, e in terms.values())
    wf = hf_set(e for _, e in forms.values())
    return wt, wf


def _depth_of(k: HfSet) -> int:
    if not is_ordinal(k):
        raise NotACode((), k, "depth")
    return ordinal_value(k)


def _abst_witness(v: HfSet, k: HfSet, a: HfSet, formula: bool):
    ind = {}

    def on_var(c, d):
        if c is v:
            r = ind.get(d)
            if r is None:
                r = ind[d] = pair(Q_IND, ordinal(d))
            return r
        return c

    return _rewrite_witness(a, _depth_of(k), on_var, formula)


def _subst_witness(v: HfSet, x: HfSet, a: HfSet, formula: bool):
    return _rewrite_witness(a, None, lambda c, d: x if c is v else c, formula)


def _is_var_code(v: HfSet) -> bool:
    return is_ordinal(v) and v is not _EMPTY


# predicates ----------------------------------------------------------------------------


def lstseq_p(s: str = "s", k: str = "k") -> PredicateFormula:
    """``s`` is a sequence of length ``k``."""
    S, K = Var(s), Var(k)
    e, e2, l, l2, y, y2 = (_fresh((s, k)) for _ in range(6))
    E, E2, L, L2, Y, Y2 = map(Var, (e, e2, l, l2, y, y2))
    indexed = _all_in(e, S, _f(_ex([l, y], conj(Mem(L, K), Eq(E, _pr(L, Y))))))
    total = _all_in(l, K, _ex_in(e, S, _f(_ex([y], Eq(E, _pr(L, Y))))))
    single = _all_in(
        e,
        S,
        _all_in(
            e2,
            S,
            _f(_ex([l, y, l2, y2], conj(Eq(E, _pr(L, Y)), Eq(E2, _pr(L2, Y2)), Disj(_ord_ne(L, L2), Eq(E, E2))))),
        ),
    )
    built = conj(_ord(K), indexed, total, single)

    def oracle(sv: HfSet, kv: HfSet) -> bool:
        if not is_ordinal(kv):
            return False
        try:
            return len(seq_to_list(sv)) == ordinal_value(kv)
        except (NotASequence, NotAPair):
            return False

    return PredicateFormula("lstseq_p", built, (s, k), oracle)


def _term_closure(c: HfSet) -> HfSet:
    seen: set = set()
    todo = [c]
    while todo:
        x = todo.pop()
        if x in seen:
            continue
        seen.add(x)
        if x is _EMPTY or is_ordinal(x):
            continue
        try:
            tag, rest = unpair(x)
            if tag is Q_EATS:
                todo.extend(unpair(rest))
        except NotAPair:
            pass
    return hf_set(seen)


def _is_term_code(c: HfSet) -> bool:
    try:
        dec_tm(c, depth=1 << 30)
        return True
    except NotACode:
        return False


def term_p(t: str = "t") -> PredicateFormula:
    """``t`` codes a term (bound indices allowed)."""
    T = Var(t)
    w, x, j, a, b = (_fresh((t,)) for _ in range(5))
    W, X = Var(w), Var(x)
    step = _f(
        disj(
            _ord(X),
            _ex([j], And(Eq(X, _pr(_TAGS[1], Var(j))), _ord(Var(j)))),
            _ex([a, b], conj(Eq(X, _tp(_TAGS[2], Var(a), Var(b))), Mem(Var(a), W), Mem(Var(b), W))),
        )
    )
    built = exists(w, And(Mem(T, W), _all_in(x, W, step)), lambda env: _term_closure(env[t]))
    return PredicateFormula("term_p", built, (t,), _is_term_code)


def _rewrite_pred(name, params, root_conds, root_entry, with_depth, formula, v_term, hit_for, wit, oracle):
    wt, wf = _fresh(params), _fresh(params)
    WT, WF = Var(wt), Var(wf)
    parts = list(root_conds) + [Mem(root_entry, WF if formula else WT)]
    parts.append(_all_entries(WT, with_depth, lambda a, k, r: _term_step(a, k, r, WT, v_term, hit_for(k, r))))
    if formula:
        parts.append(_all_entries(WF, with_depth, lambda a, k, r: _form_step(a, k, r, WT, WF)))
    cache: dict = {}

    def both(env):
        key = tuple(env[p] for p in params)
        if key not in cache:
            cache.clear()
            cache[key] = wit(*key)
        return cache[key]

    body = conj(*parts)
    if formula:
        body = exists(wf, body, lambda env: both(env)[1])
    built = exists(wt, body, lambda env: both(env)[0])
    return PredicateFormula(name, built, params, oracle)


def _guard(fn):
    def inner(*args):
        try:
            return fn(*args)
        except (NotACode, NotAPair):
            return False

    return inner


def abst_term_p(v: str = "v", k: str = "k", t: str = "t", r: str = "r") -> PredicateFormula:
    """``r`` is term code ``t`` with variable ``v`` turned into bound index ``k``."""
    V, K = Var(v), Var(k)

    @_guard
    def oracle(vv, kv, tv, rv):
        return _is_var_code(vv) and is_ordinal(kv) and abst_code_tm(vv, ordinal_value(kv), tv) is rv

    return _rewrite_pred(
        "abst_term_p",
        (v, k, t, r),
        [_ord(K), _ord(V), _nonzero(V)],
        _tp(Var(t), K, Var(r)),
        True,
        False,
        V,
        lambda kk, rr: Eq(rr, _pr(_TAGS[1], kk)),
        lambda vv, kv, tv, rv: _abst_witness(vv, kv, tv, False),
        oracle,
    )


def subst_term_p(v: str = "v", x: str = "x", t: str = "t", r: str = "r") -> PredicateFormula:
    """``r`` is term code ``t`` with variable ``v`` replaced by ``x``."""
    V = Var(v)

    @_guard
    def oracle(vv, xv, tv, rv):
        return _is_var_code(vv) and subst_code_tm(vv, xv, tv) is rv

    return _rewrite_pred(
        "subst_term_p",
        (v, x, t, r),
        [_ord(V), _nonzero(V)],
        _pr(Var(t), Var(r)),
        False,
        False,
        V,
        lambda kk, rr: Eq(rr, Var(x)),
        lambda vv, xv, tv, rv: _subst_witness(vv, xv, tv, False),
        oracle,
    )


def abst_form_p(v: str = "v", k: str = "k", a: str = "a", r: str = "r") -> PredicateFormula:
    """``r`` is formula code ``a`` with variable ``v`` turned into the index ``k`` (shifted under binders)."""
    V, K = Var(v), Var(k)

    @_guard
    def oracle(vv, kv, av, rv):
        return _is_var_code(vv) and is_ordinal(kv) and abst_code(vv, ordinal_value(kv), av) is rv

    return _rewrite_pred(
        "abst_form_p",
        (v, k, a, r),
        [_ord(K), _ord(V), _nonzero(V)],
        _tp(Var(a), K, Var(r)),
        True,
        True,
        V,
        lambda kk, rr: Eq(rr, _pr(_TAGS[1], kk)),
        lambda vv, kv, av, rv: _abst_witness(vv, kv, av, True),
        oracle,
    )


def subst_form_p(v: str = "v", x: str = "x", a: str = "a", r: str = "r") -> PredicateFormula:
    """``r`` is formula code ``a`` with variable ``v`` replaced by ``x``."""
    V = Var(v)

    @_guard
    def oracle(vv, xv, av, rv):
        return _is_var_code(vv) and subst_code(vv, xv, av) is rv

    return _rewrite_pred(
        "subst_form_p",
        (v, x, a, r),
        [_ord(V), _nonzero(V)],
        _pr(Var(a), Var(r)),
        False,
        True,
        V,
        lambda kk, rr: Eq(rr, Var(x)),
        lambda vv, xv, av, rv: _subst_witness(vv, xv, av, True),
        oracle,
    )


def _binder_var(y: HfSet, u: HfSet) -> HfSet:
    """A variable code whose abstraction from ``u`` gives the body of ``y``."""
    try:
        tag, body = unpair(y)
        occurring = var_codes_in(u)
    except (NotAPair, NotACode):
        return ordinal(1)
    if tag is Q_EX:
        for c in sorted(occurring):
            if c is not _EMPTY and abst_code(c, 0, u) is body:
                return c
    top = max((ordinal_value(c) for c in occurring), default=0)
    return ordinal(top + 1)


def make_form_p(y: str = "y", u: str = "u", w: str = "w") -> PredicateFormula:
    """``y`` is built from ``u`` (and ``w``) by a disjunction, negation or existential."""
    Y, U, W = Var(y), Var(u), Var(w)
    v, au = _fresh((y, u, w)), _fresh((y, u, w))
    inner = abst_form_p(v, "k_", u, au)
    if "k_" in (y, u, w):
        raise FreshnessExhausted("parameter name k_ is reserved")
    abst = inner.instantiate({"k_": ZERO})

    def body_of(env):
        tag, body = unpair(env[y])
        return body if tag is Q_EX else _EMPTY

    ex_case = exists(
        v,
        exists(au, conj(abst, Eq(Y, _pr(_TAGS[7], Var(au)))), body_of),
        lambda env: _binder_var(env[y], env[u]),
    )
    built = disj(Eq(Y, _tp(_TAGS[5], U, W)), Eq(Y, _pr(_TAGS[6], U)), ex_case)
    return PredicateFormula("make_form_p", built, (y, u, w), make_form)


def _q_witness(x: HfSet, r: HfSet) -> HfSet:
    try:
        t = dec_tm(r)
    except NotACode:
        return _EMPTY
    if t.fv:
        return _EMPTY
    entries: dict = {}
    todo = [t]
    while todo:
        s = todo.pop()
        if s in entries:
            continue
        entries[s] = pair(eval_tm({}, s), enc_tm(s))
        if type(s) is Eats:
            todo += [s.left, s.right]
    return hf_set(entries.values())


def _q_oracle(x: HfSet, r: HfSet) -> bool:
    try:
        t = dec_tm(r)
    except NotACode:
        return False
    return not t.fv and eval_tm({}, t) is x


def q_p(x: str = "x", r: str = "r") -> PredicateFormula:
    """``r`` codes a ground term whose value is ``x``."""
    X, R = Var(x), Var(r)
    w, e, s, c, y1, x1, a, b = (_fresh((x, r)) for _ in range(8))
    W = Var(w)
    step = _f(
        disj(
            And(Eq(Var(s), ZERO), Eq(Var(c), ZERO)),
            _ex(
                [y1, x1, a, b],
                conj(
                    Eq(Var(s), Eats(Var(x1), Var(y1))),
                    Eq(Var(c), _tp(_TAGS[2], Var(a), Var(b))),
                    Mem(_pr(Var(x1), Var(a)), W),
                    Mem(_pr(Var(y1), Var(b)), W),
                ),
            ),
        )
    )
    entries = _all_in(e, W, _f(_ex([s, c], And(Eq(Var(e), _pr(Var(s), Var(c))), step))))
    built = exists(w, And(Mem(_pr(X, R), W), entries), lambda env: _q_witness(env[x], env[r]))
    return PredicateFormula("q_p", built, (x, r), _q_oracle)


def _krp_oracle(v: HfSet, x: HfSet, y: HfSet) -> bool:
    if not _is_var_code(v):
        return False
    try:
        return subst_code(v, enc_tm(canonical_term(x)), x) is y
    except NotACode:
        return False


def krp_p(v: str = "v", x: str = "x", y: str = "y") -> PredicateFormula:
    """``y`` codes the formula coded by ``x`` with variable ``v`` replaced by the quotation of ``x``."""
    r = _fresh((v, x, y))
    body = conj(q_p(x, r), subst_form_p(v, r, x, y))
    built = exists(r, body, lambda env: enc_tm(canonical_term(env[x])))
    return PredicateFormula("krp_p", built, (v, x, y), _krp_oracle)


PREDICATES: dict[str, Callable[..., PredicateFormula]] = {
    "lstseq_p": lstseq_p,
    "term_p": term_p,
    "abst_term_p": abst_term_p,
    "subst_term_p": subst_term_p,
    "abst_form_p": abst_form_p,
    "subst_form_p": subst_form_p,
    "make_form_p": make_form_p,
    "q_p": q_p,
    "krp_p": krp_p,
}
