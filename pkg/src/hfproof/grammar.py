"""Concrete ASCII syntax for terms and formulas.

Terms are ``0``, identifiers and ``t <| u`` (left associative; the printer
always parenthesises it).  Formulas use ``t IN u``, ``t = u``, ``~A``,
``A & B``, ``A | B``, ``A -> B`` (right associative), ``A <-> B`` and the
binders ``Ex x. A``, ``All x. A`` and ``All2 x : t . A``, whose bodies extend
as far right as possible.

Large shared DAGs may be written with a prefix of definitions
``$1 := (0 <| 0); $2 := ($1 <| $1); $2 IN $2``.  A definition is a term or a
formula, and a reference is plain macro expansion.
"""

from __future__ import annotations

import re

from hfproof._deep import deep
from hfproof.syntax import (
    ZERO,
    All,
    All2,
    And,
    Bound,
    Disj,
    Eats,
    Eq,
    Ex,
    Formula,
    Iff,
    Imp,
    Mem,
    Neg,
    Term,
    Var,
    Zero,
    match_all,
    match_all2,
    match_and,
    match_iff,
    match_imp,
    mk_ex,
)

__all__ = [
    "ParseError",
    "parse_fm",
    "parse_tm",
    "print_fm",
    "print_tm",
    "SyntaxPrinter",
    "SyntaxReader",
    "KEYWORDS",
]

KEYWORDS = frozenset({"IN", "Ex", "All", "All2"})
SHARE_THRESHOLD = 400


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos
        self.reason = message


_TOKEN = re.compile(
    r"\s*(?:(?P<ref>\$\d+)|(?P<name>[a-zA-Z_][a-zA-Z0-9_']*)|(?P<zero>0)"
    r"|(?P<op><->|<\||->|:=|[()~&|=.:;]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        kind = m.lastgroup
        value = m.group(kind)
        if kind == "name" and value in KEYWORDS:
            kind = "op"
        out.append((kind, value, start))
        pos = m.end()
    out.append(("eof", "", n))
    return out


class _Parser:
    def __init__(self, text: str, defs: dict | None = None):
        self.toks = _tokenize(text)
        self.i = 0
        self.defs: dict[str, object] = {} if defs is None else defs
        self._term_memo: dict[int, tuple] = {}

    # token helpers
    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value: str) -> bool:
        kind, v, _ = self.peek()
        return kind == "op" and v == value

    def expect(self, value: str):
        kind, v, pos = self.peek()
        if kind != "op" or v != value:
            raise ParseError(f"expected {value!r}, found {v or 'end of input'!r}", pos)
        self.i += 1

    def fail(self, what: str):
        _, v, pos = self.peek()
        raise ParseError(f"expected {what}, found {v or 'end of input'!r}", pos)

    # definitions
    def definitions(self):
        while self.peek()[0] == "ref" and self.peek(1)[:2] == ("op", ":="):
            ref = self.peek()[1]
            self.i += 2
            save = self.i
            try:
                value = self.formula()
            except ParseError:
                self.i = save
                value = self.term()
            self.expect(";")
            self.defs[ref] = value

    def reference(self, cls):
        _, ref, pos = self.peek()
        value = self.defs.get(ref)
        if value is None:
            raise ParseError(f"undefined reference {ref}", pos)
        if not isinstance(value, cls):
            raise ParseError(f"{ref} is not a {cls.__name__.lower()}", pos)
        self.i += 1
        return value

    # terms
    def term(self) -> Term:
        start = self.i
        hit = self._term_memo.get(start)
        if hit is not None:
            value, end = hit
            if isinstance(value, ParseError):
                raise value
            self.i = end
            return value
        try:
            left = self.term_atom()
            while self.at("<|"):
                self.i += 1
                left = Eats(left, self.term_atom())
        except ParseError as exc:
            self._term_memo[start] = (exc, self.i)
            raise
        self._term_memo[start] = (left, self.i)
        return left

    def term_atom(self) -> Term:
        kind, value, pos = self.peek()
        if kind == "zero":
            self.i += 1
            return ZERO
        if kind == "name":
            self.i += 1
            return Var(value)
        if kind == "ref":
            return self.reference(Term)
        if self.at("("):
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        self.fail("a term")

    # formulas
    def formula(self) -> Formula:
        left = self.imp()
        if self.at("<->"):
            while self.at("<->"):
                self.i += 1
                left = Iff(left, self.imp())
        return left

    def imp(self) -> Formula:
        left = self.disj()
        if self.at("->"):
            self.i += 1
            return Imp(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.at("|"):
            self.i += 1
            left = Disj(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.i += 1
            left = And(left, self.unary())
        return left

    def binder_name(self) -> str:
        kind, value, _ = self.peek()
        if kind != "name":
            self.fail("a variable name")
        self.i += 1
        return value

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "op":
            if value == "~":
                self.i += 1
                return Neg(self.unary())
            if value in ("Ex", "All"):
                self.i += 1
                name = self.binder_name()
                self.expect(".")
                body = self.formula()
                return mk_ex(name, body) if value == "Ex" else All(name, body)
            if value == "All2":
                self.i += 1
                name = self.binder_name()
                self.expect(":")
                bound = self.term()
                self.expect(".")
                body = self.formula()
                if name in bound.fv:
                    raise ParseError(f"bounded variable {name} occurs in its bound", pos)
                return All2(name, bound, body)
            if value == "(":
                save = self.i
                try:
                    return self.atom()
                except ParseError:
                    self.i = save
                self.i += 1
                inner = self.formula()
                self.expect(")")
                return inner
        if kind == "ref" and isinstance(self.defs.get(value), Formula):
            return self.reference(Formula)
        return self.atom()

    def atom(self) -> Formula:
        left = self.term()
        if self.at("IN"):
            self.i += 1
            return Mem(left, self.term())
        if self.at("="):
            self.i += 1
            return Eq(left, self.term())
        self.fail("'IN' or '='")

    def finish(self):
        kind, value, pos = self.peek()
        if kind != "eof":
            raise ParseError(f"unexpected {value!r}", pos)


@deep
def parse_fm(text: str) -> Formula:
    p = _Parser(text)
    p.definitions()
    a = p.formula()
    p.finish()
    return a


@deep
def parse_tm(text: str) -> Term:
    p = _Parser(text)
    p.definitions()
    t = p.term()
    p.finish()
    return t


# printing -------------------------------------------------------------------

_BINDER_NAMES = ("x", "y", "z", "u", "v", "w")

# precedence levels; a child printed below the level its context needs gets parens
_BIND, _IFF, _IMP, _OR, _AND, _UNARY = range(6)


class _Printer:
    def __init__(self, roots, share: bool):
        self.avoid = set()
        for r in roots:
            self.avoid |= r.fv
        self.names: list[str] = []
        self.defs: dict[object, str] = {}
        self.lines: list[tuple[str, str]] = []
        self.shared: set = set()
        if share:
            self._plan_sharing(roots)

    def _plan_sharing(self, roots):
        indeg: dict = {}
        seen = set()
        stack = list(roots)
        for r in roots:
            indeg[r] = indeg.get(r, 0) + 1
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            for child in _children(node):
                indeg[child] = indeg.get(child, 0) + 1
                stack.append(child)
        self.shared = {
            node for node, k in indeg.items() if k > 1 and node.level == 0 and node.size > 3
        }

    def binder(self, depth: int) -> str:
        while len(self.names) <= depth:
            k = len(self.names)
            base = _BINDER_NAMES[k % len(_BINDER_NAMES)]
            cand = base if k < len(_BINDER_NAMES) else f"{base}{k // len(_BINDER_NAMES)}"
            while cand in self.avoid:
                cand += "'"
            self.names.append(cand)
        return self.names[depth]

    def ref(self, node, render):
        name = self.defs.get(node)
        if name is None:
            text = render()
            name = f"${len(self.defs) + 1}"
            self.defs[node] = name
            self.lines.append((name, text))
        return name

    def term(self, t: Term, depth: int) -> str:
        if t in self.shared:
            return self.ref(t, lambda: self._term(t, depth))
        return self._term(t, depth)

    def _term(self, t: Term, depth: int) -> str:
        cls = type(t)
        if cls is Zero:
            return "0"
        if cls is Var:
            return t.name
        if cls is Bound:
            if t.index >= depth:
                raise ValueError("cannot print a term with a loose bound variable")
            return self.binder(depth - 1 - t.index)
        return f"({self.term(t.left, depth)} <| {self.term(t.right, depth)})"

    def fm(self, a: Formula, depth: int, need: int) -> str:
        if a in self.shared:
            return self.ref(a, lambda: self._fm(a, depth, _BIND))
        return self._fm(a, depth, need)

    def _fm(self, a: Formula, depth: int, need: int) -> str:
        text, level = self._render(a, depth)
        return f"({text})" if level < need else text

    def _render(self, a: Formula, depth: int) -> tuple[str, int]:
        parts = match_iff(a)
        if parts is not None:
            return f"{self.fm(parts[0], depth, _IFF)} <-> {self.fm(parts[1], depth, _IMP)}", _IFF
        parts = match_and(a)
        if parts is not None:
            return f"{self.fm(parts[0], depth, _AND)} & {self.fm(parts[1], depth, _UNARY)}", _AND
        parts = match_all2(a)
        if parts is not None:
            t, body = parts
            x = self.binder(depth)
            return f"All2 {x} : {self.term(t, depth)} . {self.fm(body, depth + 1, _BIND)}", _BIND
        body = match_all(a)
        if body is not None:
            x = self.binder(depth)
            return f"All {x}. {self.fm(body, depth + 1, _BIND)}", _BIND
        parts = match_imp(a)
        if parts is not None:
            return f"{self.fm(parts[0], depth, _OR)} -> {self.fm(parts[1], depth, _IMP)}", _IMP
        cls = type(a)
        if cls is Mem:
            return f"{self.term(a.left, depth)} IN {self.term(a.right, depth)}", _UNARY
        if cls is Eq:
            return f"{self.term(a.left, depth)} = {self.term(a.right, depth)}", _UNARY
        if cls is Disj:
            return f"{self.fm(a.left, depth, _OR)} | {self.fm(a.right, depth, _AND)}", _OR
        if cls is Neg:
            return f"~{self.fm(a.body, depth, _UNARY)}", _UNARY
        x = self.binder(depth)
        return f"Ex {x}. {self.fm(a.body, depth + 1, _BIND)}", _BIND

    def wrap(self, text: str) -> str:
        if not self.lines:
            return text
        return " ".join(f"{n} := {t};" for n, t in self.lines) + " " + text


def _children(node):
    cls = type(node)
    if cls is Eats or cls is Mem or cls is Eq or cls is Disj:
        return (node.left, node.right)
    if cls is Neg or cls is Ex:
        return (node.body,)
    return ()


@deep
def print_fm(a: Formula, share: bool | None = None) -> str:
    """Render ``a``; ``parse_fm`` of the result is ``a`` itself."""
    if a.level:
        raise ValueError("cannot print a formula with a loose bound variable")
    if share is None:
        share = a.size > SHARE_THRESHOLD
    p = _Printer([a], share)
    return p.wrap(p._fm(a, 0, _BIND))


@deep
def print_tm(t: Term, share: bool | None = None) -> str:
    if t.level:
        raise ValueError("cannot print a term with a loose bound variable")
    if share is None:
        share = t.size > SHARE_THRESHOLD
    p = _Printer([t], share)
    return p.wrap(p._term(t, 0))


class SyntaxPrinter:
    """Prints many terms and formulas against one table of shared definitions.

    Call :meth:`new_defs` after printing to collect ``(name, text)`` pairs for
    definitions introduced since the previous call; each text only refers to
    earlier definitions.
    """

    def __init__(self, roots, share: bool = True):
        roots = [r for r in roots if r.level == 0]
        self._p = _Printer(roots, share)
        self._taken = 0

    def fm(self, a: Formula) -> str:
        return _run(lambda: self._p.fm(a, 0, _BIND))

    def tm(self, t: Term) -> str:
        return _run(lambda: self._p.term(t, 0))

    def new_defs(self) -> list[tuple[str, str]]:
        out = self._p.lines[self._taken :]
        self._taken = len(self._p.lines)
        return out


class SyntaxReader:
    """Parses texts that may refer to definitions registered with :meth:`define`."""

    def __init__(self):
        self.defs: dict[str, object] = {}

    def define(self, name: str, text: str):
        if not re.fullmatch(r"\$\d+", name):
            raise ParseError(f"bad definition name {name!r}", 0)
        p = _Parser(text, self.defs)

        def body():
            save = p.i
            try:
                value = p.formula()
                p.finish()
                return value
            except ParseError:
                p.i = save
            value = p.term()
            p.finish()
            return value

        self.defs[name] = _run(body)

    def fm(self, text: str) -> Formula:
        p = _Parser(text, self.defs)
        return _run(lambda: (p.definitions(), p.formula(), p.finish())[1])

    def tm(self, text: str) -> Term:
        p = _Parser(text, self.defs)
        return _run(lambda: (p.definitions(), p.term(), p.finish())[1])


@deep
def _run(fn):
    return fn()
