"""Executable model of the hereditarily finite sets.

Every set is interned: two live ``HfSet`` values are equal exactly when they
are the same object, so ``is``, ``==`` and hashing coincide with
extensional equality.  Elements are kept in ascending Ackermann order, which
is decided structurally (see :func:`hf_compare`) so that sets far too large
to have a computable Ackermann index can still be ordered.

Von Neumann ordinals get a lazy representation: ``ordinal(n)`` costs O(1)
and its member tuple is only materialised when somebody iterates it.
"""

from __future__ import annotations

import itertools
import re
import weakref
from bisect import bisect_left
from functools import cmp_to_key
from typing import Iterable, Iterator, Sequence

__all__ = [
    "HfSet",
    "NotAPair",
    "NotASequence",
    "IndexOutOfRange",
    "SetParseError",
    "empty",
    "eats",
    "member",
    "subset_of",
    "hf_set",
    "pair",
    "unpair",
    "is_pair",
    "ordinal",
    "is_ordinal",
    "ack_index",
    "from_ack_index",
    "hf_compare",
    "rank",
    "seq_from_list",
    "seq_lookup",
    "seq_to_list",
    "sets_below",
    "sets_of_rank_at_most",
    "parse_set",
    "format_set",
]

# Indices whose binary expansion would need more bits than this are refused.
MAX_INDEX_BITS = 1 << 24


class NotAPair(ValueError):
    pass


class NotASequence(ValueError):
    pass


class IndexOutOfRange(IndexError):
    pass


class SetParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


_TABLE: weakref.WeakValueDictionary = weakref.WeakValueDictionary()
_ids = itertools.count()


class HfSet:
    """A hereditarily finite set (immutable, interned)."""

    __slots__ = ("_elems", "_ord", "_id", "_members", "_ack", "_rank", "__weakref__")

    def __init__(self):
        raise TypeError("use empty(), eats(), hf_set() or ordinal() to build sets")

    # construction -----------------------------------------------------

    @staticmethod
    def _raw(elems, n):
        obj = object.__new__(HfSet)
        obj._elems = elems
        obj._ord = n
        obj._id = next(_ids)
        obj._members = None
        obj._ack = None
        obj._rank = None
        return obj

    # structure ----------------------------------------------------------

    @property
    def elements(self) -> tuple[HfSet, ...]:
        """Members in ascending Ackermann order."""
        if self._elems is None:
            self._elems = tuple(ordinal(k) for k in range(self._ord))
        return self._elems

    def iter_desc(self) -> Iterator[HfSet]:
        if self._elems is None:
            return (ordinal(k) for k in range(self._ord - 1, -1, -1))
        return reversed(self._elems)

    def __len__(self) -> int:
        return self._ord if self._elems is None else len(self._elems)

    def __iter__(self) -> Iterator[HfSet]:
        return iter(self.elements)

    def __contains__(self, u) -> bool:
        return member(u, self)

    def __bool__(self) -> bool:
        return len(self) > 0

    def __lt__(self, other: HfSet) -> bool:
        return hf_compare(self, other) < 0

    def __le__(self, other: HfSet) -> bool:
        return hf_compare(self, other) <= 0

    def __gt__(self, other: HfSet) -> bool:
        return hf_compare(self, other) > 0

    def __ge__(self, other: HfSet) -> bool:
        return hf_compare(self, other) >= 0

    def __reduce__(self):
        return (parse_set, (format_set(self, compact=True),))

    def __repr__(self) -> str:
        text = format_set(self, compact=True)
        if len(text) > 200:
            text = text[:197] + "..."
        return f"HfSet({text})"


def _intern_ordinal(n: int) -> HfSet:
    s = _TABLE.get(n)
    if s is None:
        s = HfSet._raw(None, n)
        _TABLE[n] = s
    return s


# Small ordinals and small Ackermann-indexed sets stay alive for the whole run.
_PINNED: list[HfSet] = []


def ordinal(n: int) -> HfSet:
    """The von Neumann ordinal ``n`` (``0 = {}``, ``n+1 = n <| n``)."""
    if n < 0:
        raise ValueError("ordinals are non-negative")
    return _intern_ordinal(n)


def _from_sorted(elems: tuple[HfSet, ...]) -> HfSet:
    k = len(elems)
    if all(e._ord == i for i, e in enumerate(elems)):
        return _intern_ordinal(k)
    key = tuple(e._id for e in elems)
    s = _TABLE.get(key)
    if s is None:
        s = HfSet._raw(elems, None)
        _TABLE[key] = s
    return s


def empty() -> HfSet:
    return _intern_ordinal(0)


_cmp_key = None  # set below, after hf_compare exists


def hf_set(elements: Iterable[HfSet] = ()) -> HfSet:
    """Build a set from members given in any order, with repetitions allowed."""
    unique = {e._id: e for e in elements}
    return _from_sorted(tuple(sorted(unique.values(), key=_cmp_key)))


def member(u: HfSet, z: HfSet) -> bool:
    if z._elems is None:
        return u._ord is not None and u._ord < z._ord
    if z._members is None:
        z._members = frozenset(e._id for e in z._elems)
    return u._id in z._members


_EATS_MEMO: dict = {}
_EATS_MEMO_LIMIT = 1 << 18


def eats(x: HfSet, y: HfSet) -> HfSet:
    """``x <| y``, i.e. ``x`` together with the extra member ``y``."""
    if member(y, x):
        return x
    if x._ord is not None and y is x:
        return _intern_ordinal(x._ord + 1)
    key = (x._id, y._id)
    hit = _EATS_MEMO.get(key)
    if hit is not None and hit[0] is x and hit[1] is y:
        return hit[2]
    elems = x.elements
    pos = bisect_left(elems, _cmp_key(y), key=_cmp_key)
    r = _from_sorted(elems[:pos] + (y,) + elems[pos:])
    if len(_EATS_MEMO) >= _EATS_MEMO_LIMIT:
        _EATS_MEMO.clear()
    _EATS_MEMO[key] = (x, y, r)
    return r


def subset_of(x: HfSet, z: HfSet) -> bool:
    if x._ord is not None and z._ord is not None:
        return x._ord <= z._ord
    return all(member(e, z) for e in x)


def remove(x: HfSet, y: HfSet) -> HfSet:
    """``x`` without the member ``y`` (``x`` itself if ``y`` is absent)."""
    if not member(y, x):
        return x
    return _from_sorted(tuple(e for e in x.elements if e is not y))


def is_ordinal(x: HfSet) -> bool:
    return x._ord is not None


def ordinal_value(x: HfSet) -> int:
    if x._ord is None:
        raise ValueError("not an ordinal")
    return x._ord


# pairs and sequences ----------------------------------------------------


def pair(x: HfSet, y: HfSet) -> HfSet:
    """Kuratowski pair ``{{x},{x,y}}``."""
    sx = hf_set([x])
    return hf_set([sx, hf_set([x, y])])


def unpair(p: HfSet) -> tuple[HfSet, HfSet]:
    n = len(p)
    if p._ord is not None or n not in (1, 2):
        raise NotAPair(p)
    if n == 1:
        (s,) = p.elements
        if len(s) != 1:
            raise NotAPair(p)
        (x,) = s.elements
        return x, x
    small, big = p.elements
    # the singleton always precedes the doubleton in Ackermann order
    if len(small) != 1 or len(big) != 2:
        raise NotAPair(p)
    (x,) = small.elements
    if not member(x, big):
        raise NotAPair(p)
    (y,) = [e for e in big.elements if e is not x]
    return x, y


def is_pair(p: HfSet) -> bool:
    try:
        unpair(p)
    except NotAPair:
        return False
    return True


def seq_from_list(items: Sequence[HfSet]) -> HfSet:
    return hf_set(pair(ordinal(i), y) for i, y in enumerate(items))


def _seq_map(s: HfSet) -> dict[int, HfSet]:
    table: dict[int, HfSet] = {}
    for p in s:
        try:
            i, y = unpair(p)
        except NotAPair:
            raise NotASequence(s) from None
        if i._ord is None or i._ord in table:
            raise NotASequence(s)
        table[i._ord] = y
    if set(table) != set(range(len(table))):
        raise NotASequence(s)
    return table


def seq_lookup(s: HfSet, index: int) -> HfSet:
    table = _seq_map(s)
    if not 0 <= index < len(table):
        raise IndexOutOfRange(index)
    return table[index]


def seq_to_list(s: HfSet) -> list[HfSet]:
    table = _seq_map(s)
    return [table[i] for i in range(len(table))]


# Ackermann order --------------------------------------------------------


def hf_compare(x: HfSet, y: HfSet) -> int:
    """Compare by Ackermann index without computing the index.

    The binary expansion of ``f(x)`` has a one exactly at the indices of the
    members of ``x``, so the larger set is the one owning the largest member
    of the symmetric difference.
    """
    while True:
        if x is y:
            return 0
        if x._ord is not None and y._ord is not None:
            return -1 if x._ord < y._ord else 1
        for a, b in itertools.zip_longest(x.iter_desc(), y.iter_desc()):
            if a is b:
                continue
            if a is None:
                return -1
            if b is None:
                return 1
            x, y = a, b
            break
        else:  # pragma: no cover - distinct interned sets always differ
            return 0


_cmp_key = cmp_to_key(hf_compare)


def ack_index(x: HfSet) -> int:
    """Ackermann index ``f(x) = sum(2**f(y) for y in x)``."""
    if x._ack is not None:
        return x._ack
    if x._ord is not None and x._ord > 5:
        raise OverflowError("Ackermann index of an ordinal above 5 is astronomically large")
    total = 0
    for y in x.elements:
        k = ack_index(y)
        if k > MAX_INDEX_BITS:
            raise OverflowError("Ackermann index too large to materialise")
        total |= 1 << k
    x._ack = total
    return total


_BY_INDEX: list[HfSet] = []
_BY_INDEX_LIMIT = 1 << 16


def from_ack_index(n: int) -> HfSet:
    """Inverse of :func:`ack_index`: the members are the set bits of ``n``."""
    if n < 0:
        raise ValueError("Ackermann indices are non-negative")
    if n < len(_BY_INDEX):
        return _BY_INDEX[n]
    if n < _BY_INDEX_LIMIT:
        while len(_BY_INDEX) <= n:
            m = len(_BY_INDEX)
            s = _build_from_index(m)
            _BY_INDEX.append(s)
        return _BY_INDEX[n]
    return _build_from_index(n)


def _build_from_index(n: int) -> HfSet:
    members = []
    bit = 0
    rest = n
    while rest:
        if rest & 1:
            members.append(from_ack_index(bit))
        rest >>= 1
        bit += 1
    # members come out in ascending index order already
    s = _from_sorted(tuple(members))
    s._ack = n
    return s


def sets_below(bound: int) -> Iterator[HfSet]:
    """All sets with Ackermann index ``< bound`` in ascending order."""
    for n in range(bound):
        yield from_ack_index(n)


def rank(x: HfSet) -> int:
    if x._rank is None:
        if x._ord is not None:
            x._rank = x._ord
        else:
            x._rank = max((rank(e) + 1 for e in x.elements), default=0)
    return x._rank


def sets_of_rank_at_most(r: int) -> list[HfSet]:
    """Every set of rank ``<= r`` (there are tower-of-two many), ascending."""
    count = 0
    for _ in range(r + 1):
        count = 1 << count
    if count > (1 << 16):
        raise OverflowError("too many sets to enumerate")
    return [from_ack_index(n) for n in range(count)]


# text notation ----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(#\d+)|(\$\d+)|([{},;=]))")


def parse_set(text: str) -> HfSet:
    """Parse ``0``, ``{a,b,...}``, ``#n`` (ordinal n) and ``$k = ...;`` sharing."""
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise SetParseError("unexpected character", pos)
        tokens.append((m.group(m.lastindex), m.start(m.lastindex)))
        pos = m.end()
    tokens.append(("<eof>", len(text)))
    defs: dict[str, HfSet] = {}
    i = 0

    def peek():
        return tokens[i][0]

    def take(expected=None):
        nonlocal i
        tok, where = tokens[i]
        if expected is not None and tok != expected:
            raise SetParseError(f"expected {expected!r}, found {tok!r}", where)
        i += 1
        return tok

    def expr() -> HfSet:
        tok, where = tokens[i]
        if tok == "0":
            take()
            return empty()
        if tok.startswith("#"):
            take()
            return ordinal(int(tok[1:]))
        if tok.startswith("$"):
            take()
            if tok not in defs:
                raise SetParseError(f"undefined reference {tok}", where)
            return defs[tok]
        if tok == "{":
            take()
            items = []
            if peek() != "}":
                items.append(expr())
                while peek() == ",":
                    take()
                    items.append(expr())
            take("}")
            return hf_set(items)
        raise SetParseError(f"unexpected token {tok!r}", where)

    while peek().startswith("$") and tokens[i + 1][0] == "=":
        name = take()
        take("=")
        defs[name] = expr()
        take(";")
    result = expr()
    if peek() != "<eof>":
        raise SetParseError("trailing input", tokens[i][1])
    return result


def format_set(x: HfSet, compact: bool = False) -> str:
    """Braces notation.  ``compact`` abbreviates ordinals and shares repeats."""
    if not compact:
        memo: dict[int, str] = {}

        def plain(s: HfSet) -> str:
            r = memo.get(s._id)
            if r is None:
                r = "0" if len(s) == 0 else "{" + ",".join(plain(e) for e in s) + "}"
                memo[s._id] = r
            return r

        return plain(x)

    uses: dict[int, int] = {}
    order: list[HfSet] = []
    stack = [(x, False)]
    while stack:
        s, done = stack.pop()
        if done:
            order.append(s)
            continue
        if s._ord is not None:
            continue
        n = uses.get(s._id, 0)
        uses[s._id] = n + 1
        if n:
            continue
        stack.append((s, True))
        stack.extend((e, False) for e in reversed(s.elements))
    names: dict[int, str] = {}
    defs = []

    def render(s: HfSet) -> str:
        if s._ord is not None:
            return "0" if s._ord == 0 else f"#{s._ord}"
        if s._id in names:
            return names[s._id]
        return "{" + ",".join(render(e) for e in s) + "}"

    for s in order:
        if uses[s._id] > 1 and s is not x:
            text = render(s)
            name = f"${len(names) + 1}"
            defs.append(f"{name} = {text}; ")
            names[s._id] = name
    return "".join(defs) + render(x)


# a few small sets are used constantly; keep them alive
_PINNED.extend(ordinal(k) for k in range(16))
