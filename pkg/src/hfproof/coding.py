"""Gödel coding of syntax and derivations as hereditarily finite sets.

Codes::

    0              -> 0
    variable i     -> the ordinal name_ord(i)
    bound k        -> <1, k>
    t <| u         -> <2, [t], [u]>
    t IN u, t = u  -> <3, [t], [u]>, <4, [t], [u]>
    A | B          -> <5, [A], [B]>
    ~A, Ex. A      -> <6, [A]>, <7, [A]>

with ``<a, b, c> = pair(a, pair(b, c))``.  Numerals are never pairs, so
variables need no tag.
"""

from __future__ import annotations

import weakref
from typing import Mapping, Sequence

from hfproof._deep import deep
from hfproof.calculus import (
    BOOL_SCHEMAS,
    EMPTY_BASE,
    EQ_SCHEMAS,
    HF_SCHEMAS,
    AxiomBase,
    Derivation,
    axiom_instance,
    nodes,
)
from hfproof.hf_model import (
    HfSet,
    NotAPair,
    NotASequence,
    eats,
    empty,
    is_ordinal,
    ordinal,
    ordinal_value,
    pair,
    remove,
    seq_from_list,
    seq_to_list,
    unpair,
)
from hfproof.syntax import (
    ZERO,
    Bound,
    Disj,
    Eats,
    Eq,
    Ex,
    Formula,
    Mem,
    Neg,
    Term,
    Var,
    Zero,
    name_from_ord,
    name_ord,
)

__all__ = [
    "NotACode",
    "Q_IND",
    "Q_EATS",
    "Q_MEM",
    "Q_EQ",
    "Q_DISJ",
    "Q_NEG",
    "Q_EX",
    "tuple3",
    "enc_tm",
    "enc_fm",
    "dec_tm",
    "dec_fm",
    "var_code",
    "canonical_term",
    "quote_tm",
    "quote_fm",
    "pair_term",
    "pseudo_quote",
    "subst_code",
    "abst_code",
    "abst_code_tm",
    "subst_code_tm",
    "var_codes_in",
    "tuple_term",
    "make_form",
    "k_apply",
    "RULE_TAGS",
    "enc_derivation",
    "pf_meta_check",
]

Q_IND, Q_EATS, Q_MEM, Q_EQ, Q_DISJ, Q_NEG, Q_EX = (ordinal(k) for k in range(1, 8))
_EMPTY = empty()
_TERM_TAG = {Q_MEM: Mem, Q_EQ: Eq}


class NotACode(ValueError):
    """``path`` gives the tuple positions leading to the offending set ``part``."""

    def __init__(self, path: Sequence[int], part: HfSet, what: str = "code"):
        super().__init__(f"not a {what} at {'.'.join(map(str, path)) or 'root'}")
        self.path = tuple(path)
        self.part = part


def tuple3(a: HfSet, b: HfSet, c: HfSet) -> HfSet:
    return pair(a, pair(b, c))


def var_code(name: str) -> HfSet:
    return ordinal(name_ord(name))


# encoding -----------------------------------------------------------------------

_ENC: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


def _enc(x, var_codes: Mapping[str, HfSet] | None) -> HfSet:
    cache = _ENC if not var_codes else {}

    def go(x):
        hit = cache.get(x)
        if hit is not None:
            return hit
        cls = type(x)
        if cls is Zero:
            r = _EMPTY
        elif cls is Var:
            r = var_codes.get(x.name) if var_codes else None
            if r is None:
                r = var_code(x.name)
        elif cls is Bound:
            r = pair(Q_IND, ordinal(x.index))
        elif cls is Eats:
            r = tuple3(Q_EATS, go(x.left), go(x.right))
        elif cls is Mem:
            r = tuple3(Q_MEM, go(x.left), go(x.right))
        elif cls is Eq:
            r = tuple3(Q_EQ, go(x.left), go(x.right))
        elif cls is Disj:
            r = tuple3(Q_DISJ, go(x.left), go(x.right))
        elif cls is Neg:
            r = pair(Q_NEG, go(x.body))
        else:
            r = pair(Q_EX, go(x.body))
        cache[x] = r
        return r

    return go(x)


@deep
def enc_tm(t: Term, var_codes: Mapping[str, HfSet] | None = None) -> HfSet:
    """Code of ``t``; ``var_codes`` optionally overrides the codes of some variables."""
    return _enc(t, var_codes)


@deep
def enc_fm(a: Formula, var_codes: Mapping[str, HfSet] | None = None) -> HfSet:
    return _enc(a, var_codes)


# decoding -----------------------------------------------------------------------


def _split(c: HfSet, path, what):
    try:
        return unpair(c)
    except NotAPair:
        raise NotACode(path, c, what) from None


def _dec_tm(c: HfSet, path: list, memo: dict) -> Term:
    hit = memo.get(c)
    if hit is not None:
        return hit
    if c is _EMPTY:
        return ZERO
    if is_ordinal(c):
        r = Var(name_from_ord(ordinal_value(c)))
    else:
        tag, rest = _split(c, path, "term code")
        if tag is Q_IND:
            if not is_ordinal(rest):
                raise NotACode(path + [1], rest, "bound index")
            r = Bound(ordinal_value(rest))
        elif tag is Q_EATS:
            a, b = _split(rest, path + [1], "term code")
            r = Eats(_dec_tm(a, path + [1, 0], memo), _dec_tm(b, path + [1, 1], memo))
        else:
            raise NotACode(path, c, "term code")
    memo[c] = r
    return r


def _dec_fm(c: HfSet, path: list, memo: dict, tmemo: dict) -> Formula:
    hit = memo.get(c)
    if hit is not None:
        return hit
    if is_ordinal(c):
        raise NotACode(path, c, "formula code")
    tag, rest = _split(c, path, "formula code")
    if tag is Q_MEM or tag is Q_EQ:
        a, b = _split(rest, path + [1], "formula code")
        r = _TERM_TAG[tag](_dec_tm(a, path + [1, 0], tmemo), _dec_tm(b, path + [1, 1], tmemo))
    elif tag is Q_DISJ:
        a, b = _split(rest, path + [1], "formula code")
        r = Disj(_dec_fm(a, path + [1, 0], memo, tmemo), _dec_fm(b, path + [1, 1], memo, tmemo))
    elif tag is Q_NEG:
        r = Neg(_dec_fm(rest, path + [1], memo, tmemo))
    elif tag is Q_EX:
        r = Ex(_dec_fm(rest, path + [1], memo, tmemo))
    else:
        raise NotACode(path, c, "formula code")
    memo[c] = r
    return r


@deep
def dec_tm(c: HfSet, depth: int = 0) -> Term:
    """Inverse of :func:`enc_tm`; the result must be locally closed at ``depth``."""
    t = _dec_tm(c, [], {})
    if t.level > depth:
        raise NotACode((), c, "locally closed term code")
    return t


@deep
def dec_fm(c: HfSet, depth: int = 0) -> Formula:
    a = _dec_fm(c, [], {}, {})
    if a.level > depth:
        raise NotACode((), c, "locally closed formula code")
    return a


# canonical terms and quotation --------------------------------------------------

_CANON: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


@deep
def canonical_term(x: HfSet) -> Term:
    """The ground term building ``x`` by adding its members in ascending order."""

    def go(x: HfSet) -> Term:
        hit = _CANON.get(x)
        if hit is not None:
            return hit
        if x is _EMPTY:
            r = ZERO
        elif is_ordinal(x):
            prev = ordinal(ordinal_value(x) - 1)
            sub = go(prev)
            r = Eats(sub, sub)
        else:
            elems = x.elements
            top = elems[-1]
            r = Eats(go(remove(x, top)), go(top))
        _CANON[x] = r
        return r

    # walk up from small prefixes so deep chains do not recurse far
    if not is_ordinal(x):
        prefix = _EMPTY
        for e in x.elements[:-1]:
            prefix = eats(prefix, e)
            if prefix not in _CANON:
                go(prefix)
    else:
        for k in range(0, ordinal_value(x), 256):
            go(ordinal(k))
    return go(x)


def quote_tm(t: Term) -> Term:
    return canonical_term(enc_tm(t))


def quote_fm(a: Formula) -> Term:
    """The ground term denoting the code of ``a``."""
    return canonical_term(enc_fm(a))


def pair_term(a: Term, b: Term) -> Term:
    """A term denoting ``pair(a, b)``; canonical when both parts are ground."""
    if not a.fv and not b.fv and not a.level and not b.level:
        from hfproof.semantics import eval_tm

        return canonical_term(pair(eval_tm({}, a), eval_tm({}, b)))
    single = Eats(ZERO, a)
    return Eats(Eats(ZERO, single), Eats(single, b))


def tuple_term(a: Term, b: Term, c: Term) -> Term:
    return pair_term(a, pair_term(b, c))


@deep
def pseudo_quote(a: Formula, keep: set | frozenset | Sequence[str]) -> Term:
    """Quotation of ``a`` in which the variables in ``keep`` stay free."""
    keep = frozenset(keep)
    memo: dict = {}

    def go(x) -> Term:
        if keep.isdisjoint(x.fv):
            return canonical_term(_enc(x, None))
        hit = memo.get(x)
        if hit is not None:
            return hit
        cls = type(x)
        if cls is Var:
            r = x
        elif cls is Eats:
            r = tuple_term(canonical_term(Q_EATS), go(x.left), go(x.right))
        elif cls is Mem or cls is Eq or cls is Disj:
            tag = {Mem: Q_MEM, Eq: Q_EQ, Disj: Q_DISJ}[cls]
            r = tuple_term(canonical_term(tag), go(x.left), go(x.right))
        else:
            tag = Q_NEG if cls is Neg else Q_EX
            r = pair_term(canonical_term(tag), go(x.body))
        memo[x] = r
        return r

    return go(a)


# code-level substitution and abstraction ------------------------------------------


def _map_code(c: HfSet, on_var, on_ex_depth: bool):
    """Rebuild formula code ``c`` with term-level variable codes rewritten by ``on_var``."""
    tmemo: dict = {}
    fmemo: dict = {}

    def term(t: HfSet, depth: int, path) -> HfSet:
        key = (t, depth)
        hit = tmemo.get(key)
        if hit is not None:
            return hit
        if t is _EMPTY:
            r = t
        elif is_ordinal(t):
            r = on_var(t, depth)
        else:
            tag, rest = _split(t, path, "term code")
            if tag is Q_IND:
                if not is_ordinal(rest):
                    raise NotACode(path + [1], rest, "bound index")
                r = t
            elif tag is Q_EATS:
                a, b = _split(rest, path + [1], "term code")
                r = tuple3(Q_EATS, term(a, depth, path + [1, 0]), term(b, depth, path + [1, 1]))
            else:
                raise NotACode(path, t, "term code")
        tmemo[key] = r
        return r

    def form(f: HfSet, depth: int, path) -> HfSet:
        key = (f, depth)
        hit = fmemo.get(key)
        if hit is not None:
            return hit
        if is_ordinal(f):
            raise NotACode(path, f, "formula code")
        tag, rest = _split(f, path, "formula code")
        if tag is Q_MEM or tag is Q_EQ:
            a, b = _split(rest, path + [1], "formula code")
            r = tuple3(tag, term(a, depth, path + [1, 0]), term(b, depth, path + [1, 1]))
        elif tag is Q_DISJ:
            a, b = _split(rest, path + [1], "formula code")
            r = tuple3(tag, form(a, depth, path + [1, 0]), form(b, depth, path + [1, 1]))
        elif tag is Q_NEG:
            r = pair(tag, form(rest, depth, path + [1]))
        elif tag is Q_EX:
            r = pair(tag, form(rest, depth + 1 if on_ex_depth else depth, path + [1]))
        else:
            raise NotACode(path, f, "formula code")
        fmemo[key] = r
        return r

    return form, term


def _check_var(vcode: HfSet):
    if not is_ordinal(vcode) or vcode is _EMPTY:
        raise NotACode((), vcode, "variable code")


@deep
def subst_code(vcode: HfSet, tcode: HfSet, c: HfSet) -> HfSet:
    """Code of ``A(i::=t)`` from the codes of ``i``, ``t`` and ``A``."""
    _check_var(vcode)
    form, _ = _map_code(c, lambda v, d: tcode if v is vcode else v, False)
    return form(c, 0, [])


@deep
def subst_code_tm(vcode: HfSet, tcode: HfSet, c: HfSet) -> HfSet:
    _check_var(vcode)
    _, term = _map_code(c, lambda v, d: tcode if v is vcode else v, False)
    return term(c, 0, [])


@deep
def abst_code(vcode: HfSet, depth: int, c: HfSet) -> HfSet:
    """Code of the abstraction body: variable ``vcode`` becomes the bound index ``depth``."""
    _check_var(vcode)
    form, _ = _map_code(c, lambda v, d: pair(Q_IND, ordinal(d)) if v is vcode else v, True)
    return form(c, depth, [])


@deep
def abst_code_tm(vcode: HfSet, depth: int, c: HfSet) -> HfSet:
    _check_var(vcode)
    _, term = _map_code(c, lambda v, d: pair(Q_IND, ordinal(d)) if v is vcode else v, True)
    return term(c, depth, [])


def var_codes_in(c: HfSet) -> set[HfSet]:
    """Variable codes occurring at term positions of formula code ``c``."""
    found: set = set()

    def note(v, d):
        found.add(v)
        return v

    form, _ = _map_code(c, note, False)
    form(c, 0, [])
    return found


def make_form(y: HfSet, u: HfSet, w: HfSet) -> bool:
    """``y`` is ``u | w``, ``~u`` or an existential whose body abstracts ``u``."""
    if y is tuple3(Q_DISJ, u, w) or y is pair(Q_NEG, u):
        return True
    try:
        tag, body = unpair(y)
    except NotAPair:
        return False
    if tag is not Q_EX:
        return False
    try:
        occurring = var_codes_in(u)
    except NotACode:
        return False
    if body is u:
        return True  # any variable not occurring in u
    return any(abst_code(v, 0, u) is body for v in occurring)


def k_apply(i: str, a: Formula) -> HfSet:
    """Code of ``a(i::=quote(a))``, computed on codes."""
    code = enc_fm(a)
    return subst_code(var_code(i), enc_tm(canonical_term(code)), code)


# derivation codes ------------------------------------------------------------------

RULE_TAGS = {
    "hyp": 0,
    "bool": 1,
    "eqax": 2,
    "hfax": 3,
    "spec": 4,
    "ind": 5,
    "mp": 6,
    "exists": 7,
    "extra": 8,
}
_SCHEMA_IDS = {name: k + 1 for table in (BOOL_SCHEMAS, EQ_SCHEMAS, HF_SCHEMAS) for k, name in enumerate(table)}
_SCHEMAS_BY_RULE = {1: list(BOOL_SCHEMAS), 2: list(EQ_SCHEMAS), 3: list(HF_SCHEMAS)}


@deep
def enc_derivation(d: Derivation) -> HfSet:
    """Linearise ``d`` into a sequence of steps ``<conclusion, rule, payload>``."""
    order = nodes(d)
    index = {id(n): k for k, n in enumerate(order)}
    steps = []
    for n in order:
        tag = ordinal(RULE_TAGS[n.rule])
        if n.rule in ("bool", "eqax", "hfax"):
            schema, *parts = n.args
            payload = pair(ordinal(_SCHEMA_IDS[schema]), seq_from_list([enc_fm(p) if isinstance(p, Formula) else enc_tm(p) for p in parts]))
        elif n.rule == "spec":
            a, i, t = n.args
            payload = tuple3(enc_fm(a), var_code(i), enc_tm(t))
        elif n.rule == "ind":
            a, i, j = n.args
            payload = tuple3(enc_fm(a), var_code(i), var_code(j))
        elif n.rule == "mp":
            payload = pair(ordinal(index[id(n.children[0])]), ordinal(index[id(n.children[1])]))
        elif n.rule == "exists":
            payload = pair(ordinal(index[id(n.children[0])]), var_code(n.args[0]))
        elif n.rule == "hyp":
            payload = enc_fm(n.args[0])
        else:
            payload = _EMPTY
        steps.append(tuple3(enc_fm(n.concl), tag, payload))
    return seq_from_list(steps)


def _imp_parts(c: HfSet):
    """``(a, b)`` if ``c`` codes ``a -> b``."""
    try:
        tag, rest = unpair(c)
        if tag is not Q_DISJ:
            return None
        neg, b = unpair(rest)
        tag2, a = unpair(neg)
    except NotAPair:
        return None
    return (a, b) if tag2 is Q_NEG else None


def _var_name(v: HfSet) -> str:
    _check_var(v)
    return name_from_ord(ordinal_value(v))


def _step_ok(k: int, step: HfSet, concls: list, base: AxiomBase) -> HfSet | None:
    concl, rest = unpair(step)
    tag, payload = unpair(rest)
    if not is_ordinal(tag):
        return None
    rule = ordinal_value(tag)
    if rule in _SCHEMAS_BY_RULE:
        sid, parts_seq = unpair(payload)
        names = _SCHEMAS_BY_RULE[rule]
        if not is_ordinal(sid) or not 1 <= ordinal_value(sid) <= len(names):
            return None
        decode = dec_fm if rule == 1 else dec_tm
        parts = [decode(p) for p in seq_to_list(parts_seq)]
        expected = enc_fm(axiom_instance(names[ordinal_value(sid) - 1], parts))
    elif rule == RULE_TAGS["spec"]:
        a, i, t = _untuple3(payload)
        expected = enc_fm(axiom_instance("Special", [dec_fm(a), _var_name(i), dec_tm(t)]))
    elif rule == RULE_TAGS["ind"]:
        a, i, j = _untuple3(payload)
        expected = enc_fm(axiom_instance("Ind", [dec_fm(a), _var_name(i), _var_name(j)]))
    elif rule == RULE_TAGS["mp"]:
        x, y = unpair(payload)
        if not (is_ordinal(x) and is_ordinal(y)) or max(ordinal_value(x), ordinal_value(y)) >= k:
            return None
        parts = _imp_parts(concls[ordinal_value(x)])
        if parts is None or parts[0] is not concls[ordinal_value(y)]:
            return None
        expected = parts[1]
    elif rule == RULE_TAGS["exists"]:
        x, v = unpair(payload)
        if not is_ordinal(x) or ordinal_value(x) >= k:
            return None
        _check_var(v)
        parts = _imp_parts(concls[ordinal_value(x)])
        if parts is None or v in var_codes_in(parts[1]):
            return None
        a, b = parts
        expected = tuple3(Q_DISJ, pair(Q_NEG, pair(Q_EX, abst_code(v, 0, a))), b)
    elif rule == RULE_TAGS["extra"]:
        if base.extra is None or payload is not _EMPTY:
            return None
        expected = enc_fm(base.extra)
    else:  # hypotheses are not theorems
        return None
    return concl if expected is concl else None


def _untuple3(c: HfSet):
    a, rest = unpair(c)
    b, d = unpair(rest)
    return a, b, d


@deep
def pf_meta_check(s: HfSet, a: HfSet, base: AxiomBase = EMPTY_BASE) -> bool:
    """``s`` codes a proof sequence (no hypotheses) whose last conclusion is ``a``."""
    try:
        steps = seq_to_list(s)
    except (NotASequence, NotAPair):
        return False
    if not steps:
        return False
    concls: list = []
    for k, step in enumerate(steps):
        try:
            c = _step_ok(k, step, concls, base)
        except (NotAPair, NotACode, NotASequence, ValueError):
            return False
        if c is None:
            return False
        concls.append(c)
    return concls[-1] is a
