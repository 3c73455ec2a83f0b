"""Terms and formulas of the HF calculus with locally nameless binding.

Free variables are named, bound variables are de Bruijn indices (``Bound(0)``
is the innermost binder).  Every node is hash-consed, so structural equality
is object identity and alpha-equivalent formulas are literally the same
object.  Operations memoise per call on node identity, which keeps them
linear in the size of the shared DAG rather than the (possibly exponential)
tree.
"""

from __future__ import annotations

import re
import weakref
from typing import Callable, Iterable, Mapping

__all__ = [
    "Term",
    "Formula",
    "Zero",
    "ZERO",
    "Var",
    "Bound",
    "Eats",
    "Mem",
    "Eq",
    "Disj",
    "Neg",
    "Ex",
    "FreeVar",
    "BoundVar",
    "Or",
    "And",
    "Imp",
    "Iff",
    "All",
    "All2",
    "Subs",
    "FLS",
    "TRU",
    "mk_ex",
    "subst_tm",
    "subst_fm",
    "subst_many",
    "abstract_fm",
    "instantiate",
    "free_names",
    "is_ground",
    "is_locally_closed",
    "name_ord",
    "name_from_ord",
    "is_name",
    "fresh_name",
    "fresh_names",
    "match_imp",
    "match_and",
    "match_iff",
    "match_all",
    "match_all2",
]

_NAME = re.compile(r"[a-zA-Z_][a-zA-Z0-9_']*\Z")
_FIRST = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_"
_REST = _FIRST + "0123456789'"


def is_name(text: str) -> bool:
    return bool(_NAME.match(text))


def name_ord(name: str) -> int:
    """Position of ``name`` in the shortlex enumeration of identifiers, from 1."""
    if not is_name(name):
        raise ValueError(f"not an identifier: {name!r}")
    offset = 0
    for length in range(1, len(name)):
        offset += len(_FIRST) * len(_REST) ** (length - 1)
    index = _FIRST.index(name[0])
    for ch in name[1:]:
        index = index * len(_REST) + _REST.index(ch)
    return offset + index + 1


def name_from_ord(n: int) -> str:
    if n < 1:
        raise ValueError("name numbers start at 1")
    n -= 1
    length = 1
    while True:
        block = len(_FIRST) * len(_REST) ** (length - 1)
        if n < block:
            break
        n -= block
        length += 1
    chars = []
    for _ in range(length - 1):
        n, r = divmod(n, len(_REST))
        chars.append(_REST[r])
    chars.append(_FIRST[n])
    return "".join(reversed(chars))


# nodes -------------------------------------------------------------------


class Term:
    """Base class of terms.  Instances are interned; compare with ``is``."""

    __slots__ = ("fv", "level", "size", "__weakref__")

    def __reduce__(self):
        from hfproof.grammar import parse_tm, print_tm

        return (parse_tm, (print_tm(self, share=True),))


class Formula:
    """Base class of formulas.  Instances are interned; compare with ``is``."""

    __slots__ = ("fv", "level", "size", "_cache", "__weakref__")

    def __reduce__(self):
        from hfproof.grammar import parse_fm, print_fm

        return (parse_fm, (print_fm(self, share=True),))

    def __repr__(self) -> str:
        from hfproof.grammar import print_fm

        text = print_fm(self, share=True)
        if len(text) > 300:
            text = text[:297] + "..."
        return f"<{text}>"

    # operator sugar, as in most logic DSLs
    def __or__(self, other: Formula) -> Formula:
        return Disj(self, other)

    def __and__(self, other: Formula) -> Formula:
        return And(self, other)

    def __invert__(self) -> Formula:
        return Neg(self)

    def __rshift__(self, other: Formula) -> Formula:
        return Imp(self, other)


_EMPTY: frozenset = frozenset()
_TABLE: weakref.WeakValueDictionary = weakref.WeakValueDictionary()


def _intern(key, build):
    node = _TABLE.get(key)
    if node is None:
        node = build()
        _TABLE[key] = node
    return node


class Zero(Term):
    __slots__ = ()

    def __new__(cls):
        return ZERO

    def __repr__(self) -> str:
        return "Zero"


ZERO = object.__new__(Zero)
ZERO.fv = _EMPTY
ZERO.level = 0
ZERO.size = 1


class Var(Term):
    __slots__ = ("name",)

    def __new__(cls, name: str):
        def build():
            if not is_name(name):
                raise ValueError(f"not an identifier: {name!r}")
            node = object.__new__(cls)
            node.name = name
            node.fv = frozenset((name,))
            node.level = 0
            node.size = 1
            return node

        return _intern(("V", name), build)

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


class Bound(Term):
    __slots__ = ("index",)

    def __new__(cls, index: int):
        def build():
            if index < 0:
                raise ValueError("negative de Bruijn index")
            node = object.__new__(cls)
            node.index = index
            node.fv = _EMPTY
            node.level = index + 1
            node.size = 1
            return node

        return _intern(("B", index), build)

    def __repr__(self) -> str:
        return f"Bound({self.index})"


class Eats(Term):
    __slots__ = ("left", "right")

    def __new__(cls, left: Term, right: Term):
        def build():
            node = object.__new__(cls)
            node.left = left
            node.right = right
            node.fv = left.fv | right.fv if right.fv else left.fv
            node.level = max(left.level, right.level)
            node.size = left.size + right.size + 1
            return node

        return _intern(("E", id(left), id(right)), build)

    def __repr__(self) -> str:
        return f"Eats({self.left!r}, {self.right!r})"


FreeVar = Var
BoundVar = Bound


def _atom(cls, tag):
    def __new__(c, left: Term, right: Term):
        def build():
            node = object.__new__(c)
            node.left = left
            node.right = right
            node.fv = left.fv | right.fv if right.fv else left.fv
            node.level = max(left.level, right.level)
            node.size = left.size + right.size + 1
            node._cache = None
            return node

        return _intern((tag, id(left), id(right)), build)

    cls.__new__ = __new__
    return cls


class Mem(Formula):
    __slots__ = ("left", "right")


class Eq(Formula):
    __slots__ = ("left", "right")


_atom(Mem, "M")
_atom(Eq, "Q")


class Disj(Formula):
    __slots__ = ("left", "right")

    def __new__(cls, left: Formula, right: Formula):
        def build():
            node = object.__new__(cls)
            node.left = left
            node.right = right
            node.fv = left.fv | right.fv if right.fv else left.fv
            node.level = max(left.level, right.level)
            node.size = left.size + right.size + 1
            node._cache = None
            return node

        return _intern(("D", id(left), id(right)), build)


class Neg(Formula):
    __slots__ = ("body",)

    def __new__(cls, body: Formula):
        def build():
            node = object.__new__(cls)
            node.body = body
            node.fv = body.fv
            node.level = body.level
            node.size = body.size + 1
            node._cache = None
            return node

        return _intern(("N", id(body)), build)


class Ex(Formula):
    """Existential quantifier; ``Bound(0)`` in ``body`` refers to this binder."""

    __slots__ = ("body",)

    def __new__(cls, body: Formula):
        def build():
            node = object.__new__(cls)
            node.body = body
            node.fv = body.fv
            node.level = max(body.level - 1, 0)
            node.size = body.size + 1
            node._cache = None
            return node

        return _intern(("X", id(body)), build)


# derived connectives --------------------------------------------------------

FLS = Mem(ZERO, ZERO)
TRU = Neg(FLS)

Or = Disj


def And(a: Formula, b: Formula) -> Formula:
    return Neg(Disj(Neg(a), Neg(b)))


def Imp(a: Formula, b: Formula) -> Formula:
    return Disj(Neg(a), b)


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Imp(a, b), Imp(b, a))


def All(i: str, a: Formula) -> Formula:
    return Neg(mk_ex(i, Neg(a)))


def All2(i: str, t: Term, a: Formula) -> Formula:
    if i in t.fv:
        raise ValueError(f"bounded variable {i} occurs in its bound")
    return All(i, Imp(Mem(Var(i), t), a))


def Subs(t: Term, u: Term) -> Formula:
    z = fresh_name(t.fv | u.fv, "z")
    return All2(z, t, Mem(Var(z), u))


def match_imp(a: Formula):
    """``(p, q)`` if ``a`` is ``p IMP q``, else None."""
    if type(a) is Disj and type(a.left) is Neg:
        return a.left.body, a.right
    return None


def match_and(a: Formula):
    if type(a) is Neg and type(a.body) is Disj:
        d = a.body
        if type(d.left) is Neg and type(d.right) is Neg:
            return d.left.body, d.right.body
    return None


def match_iff(a: Formula):
    parts = match_and(a)
    if parts is None:
        return None
    fw, bw = match_imp(parts[0]), match_imp(parts[1])
    if fw is None or bw is None or fw[0] is not bw[1] or fw[1] is not bw[0]:
        return None
    return fw


def match_all(a: Formula):
    """Body (with a loose ``Bound(0)``) of ``a`` if it is a universal."""
    if type(a) is Neg and type(a.body) is Ex and type(a.body.body) is Neg:
        return a.body.body.body
    return None


def match_all2(a: Formula):
    """``(bound_term, body)`` for ``All2``; the bound is shifted out of the binder."""
    body = match_all(a)
    if body is None:
        return None
    parts = match_imp(body)
    if parts is None or type(parts[0]) is not Mem or parts[0].left is not Bound(0):
        return None
    t = parts[0].right
    if _mentions_index(t, 0):
        return None
    return _shift_down_tm(t), parts[1]


# binding operations -----------------------------------------------------------


def _mentions_index(t: Term, k: int) -> bool:
    if t.level <= k:
        return False
    if type(t) is Bound:
        return t.index == k
    if type(t) is Eats:
        return _mentions_index(t.left, k) or _mentions_index(t.right, k)
    return False


def _shift_down_tm(t: Term) -> Term:
    """Decrement loose indices (the binder being dropped does not occur)."""
    memo: dict = {}

    def go(t: Term, depth: int) -> Term:
        if t.level <= depth:
            return t
        key = (t, depth)
        r = memo.get(key)
        if r is None:
            if type(t) is Bound:
                r = Bound(t.index - 1)
            else:
                r = Eats(go(t.left, depth), go(t.right, depth))
            memo[key] = r
        return r

    return go(t, 0)


def free_names(a) -> frozenset:
    return a.fv


def is_locally_closed(a, depth: int = 0) -> bool:
    return a.level <= depth


def is_ground(a) -> bool:
    return not a.fv and a.level == 0


def _term_map(t: Term, leaf: Callable[[Term, int], Term], depth: int, memo: dict, relevant) -> Term:
    if not relevant(t, depth):
        return t
    key = (t, depth)
    r = memo.get(key)
    if r is None:
        cls = type(t)
        if cls is Eats:
            r = Eats(
                _term_map(t.left, leaf, depth, memo, relevant),
                _term_map(t.right, leaf, depth, memo, relevant),
            )
        else:
            r = leaf(t, depth)
        memo[key] = r
    return r


def _fm_map(a: Formula, tm: Callable[[Term, int], Term], depth: int, memo: dict, relevant) -> Formula:
    if not relevant(a, depth):
        return a
    key = (a, depth)
    r = memo.get(key)
    if r is not None:
        return r
    cls = type(a)
    if cls is Mem or cls is Eq:
        r = cls(tm(a.left, depth), tm(a.right, depth))
    elif cls is Disj:
        r = Disj(_fm_map(a.left, tm, depth, memo, relevant), _fm_map(a.right, tm, depth, memo, relevant))
    elif cls is Neg:
        r = Neg(_fm_map(a.body, tm, depth, memo, relevant))
    else:
        r = Ex(_fm_map(a.body, tm, depth + 1, memo, relevant))
    memo[key] = r
    return r


def subst_tm(i: str, x: Term, t: Term) -> Term:
    """Replace every ``Var(i)`` in ``t`` by ``x``."""
    return subst_many_tm(t, {i: x})


def subst_many_tm(t: Term, mapping: Mapping[str, Term]) -> Term:
    names = frozenset(mapping)
    memo: dict = {}

    def relevant(node, depth):
        return not names.isdisjoint(node.fv)

    def leaf(node, depth):
        return mapping.get(node.name, node) if type(node) is Var else node

    return _term_map(t, leaf, 0, memo, relevant)


def subst_fm(a: Formula, i: str, x: Term) -> Formula:
    """Capture-free substitution ``a(i::=x)``; ``x`` must be locally closed."""
    return subst_many(a, {i: x})


def subst_many(a: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Simultaneous substitution of locally closed terms for names."""
    if any(t.level for t in mapping.values()):
        raise ValueError("substituted terms must be locally closed")
    names = frozenset(mapping)
    if names.isdisjoint(a.fv):
        return a
    tmemo: dict = {}

    def relevant(node, depth):
        return not names.isdisjoint(node.fv)

    def leaf(node, depth):
        return mapping.get(node.name, node) if type(node) is Var else node

    def tm(t, depth):
        return _term_map(t, leaf, 0, tmemo, relevant)

    return _fm_map(a, tm, 0, {}, relevant)


def abstract_fm(i: str, a: Formula, depth: int = 0) -> Formula:
    """Turn free ``Var(i)`` into the bound index of a binder sitting ``depth`` levels up."""
    if i not in a.fv:
        return a
    tmemo: dict = {}
    var = Var(i)

    def relevant(node, d):
        return i in node.fv

    def leaf(node, d):
        return Bound(d) if node is var else node

    def tm(t, d):
        return _term_map(t, leaf, d, tmemo, relevant)

    return _fm_map(a, tm, depth, {}, relevant)


def abstract_tm(i: str, t: Term, depth: int = 0) -> Term:
    var = Var(i)
    return _term_map(
        t,
        lambda node, d: Bound(d) if node is var else node,
        depth,
        {},
        lambda node, d: i in node.fv,
    )


def instantiate(body: Formula, t: Term, depth: int = 0) -> Formula:
    """Replace the loose index ``depth`` of an abstraction body by ``t``."""
    if t.level:
        raise ValueError("instantiating term must be locally closed")
    if body.level <= depth:
        return body
    tmemo: dict = {}

    def relevant(node, d):
        return node.level > d

    def leaf(node, d):
        if type(node) is Bound and node.index == d:
            return t
        return node

    def tm(u, d):
        return _term_map(u, leaf, d, tmemo, relevant)

    return _fm_map(body, tm, depth, {}, relevant)


def mk_ex(i: str, a: Formula) -> Formula:
    return Ex(abstract_fm(i, a))


# fresh names --------------------------------------------------------------------


def fresh_name(avoid: Iterable[str], hint: str = "x") -> str:
    avoid = set(avoid)
    if hint not in avoid:
        return hint
    k = 0
    while f"{hint}{k}" in avoid:
        k += 1
    return f"{hint}{k}"


def fresh_names(avoid: Iterable[str], count: int, hint: str = "x") -> list[str]:
    avoid = set(avoid)
    out = []
    for _ in range(count):
        n = fresh_name(avoid, hint)
        avoid.add(n)
        out.append(n)
    return out
