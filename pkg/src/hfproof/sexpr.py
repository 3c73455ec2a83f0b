"""S-expression files for derivations.

One derivation per file.  Items are read in order; the last one is the
derivation itself::

    (def $1 "(0 <| 0)")              shared term or formula, usable as $1
    (let @1 (bool B2 "$1 IN 0" ...)) shared subderivation, usable as @1
    (mp @1 (hyp "$1 IN 0"))

Node forms: ``(hyp F)``, ``(extra)``, ``(bool ID F...)``, ``(eqax ID T...)``,
``(spec F name T)``, ``(hfax ID T...)``, ``(ind F name name)``, ``(mp D D)``
and ``(exists D name)``, where F and T are strings in the formula grammar.
"""

from __future__ import annotations

import re

from hfproof._deep import deep
from hfproof.calculus import EMPTY_BASE, AxiomBase, Derivation, nodes, reconstruct
from hfproof.grammar import ParseError, SyntaxPrinter, SyntaxReader
from hfproof.syntax import Formula, Term

__all__ = ["SexprError", "write_derivation", "read_derivation", "parse_sexpr"]


class SexprError(ValueError):
    def __init__(self, message: str, pos: int = 0):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class _Str(str):
    """A quoted string token (as opposed to a bare atom)."""

    __slots__ = ("pos",)


class _Atom(str):
    __slots__ = ("pos",)


class _List(list):
    pos = 0


_TOK = re.compile(r'\s*(?:(\()|(\))|"((?:[^"\\]|\\.)*)"|([^\s()"]+))')


def parse_sexpr(text: str) -> list:
    """All top-level expressions of ``text``."""
    stack: list = [_List()]
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOK.match(text, pos)
        if m is None:
            raise SexprError("unreadable input", pos)
        start = pos
        if m.group(1):
            lst = _List()
            lst.pos = start
            stack.append(lst)
        elif m.group(2):
            if len(stack) == 1:
                raise SexprError("unbalanced ')'", start)
            done = stack.pop()
            stack[-1].append(done)
        elif m.group(3) is not None:
            tok = _Str(re.sub(r"\\(.)", r"\1", m.group(3)))
            tok.pos = start
            stack[-1].append(tok)
        else:
            tok = _Atom(m.group(4))
            tok.pos = start
            stack[-1].append(tok)
        pos = m.end()
    if len(stack) != 1:
        raise SexprError("unbalanced '('", stack[-1].pos)
    return list(stack[0])


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


@deep
def write_derivation(d: Derivation) -> str:
    order = nodes(d)
    indeg: dict = {}
    for node in order:
        for child in node.children:
            indeg[id(child)] = indeg.get(id(child), 0) + 1
    roots = []
    for node in order:
        roots.extend(a for a in node.args if isinstance(a, (Formula, Term)))
    printer = SyntaxPrinter(roots)
    lets: dict = {}
    lines: list[str] = []

    def flush():
        for name, text in printer.new_defs():
            lines.append(f"(def {name} {_quote(text)})")

    def arg(x) -> str:
        if isinstance(x, Formula):
            return _quote(printer.fm(x))
        if isinstance(x, Term):
            return _quote(printer.tm(x))
        return str(x)

    def render(node: Derivation) -> str:
        ref = lets.get(id(node))
        if ref is not None:
            return ref
        parts = [node.rule] + [arg(a) for a in node.args]
        if node.rule == "exists":
            parts = ["exists", render(node.children[0]), node.args[0]]
        elif node.children:
            parts += [render(c) for c in node.children]
        return "(" + " ".join(parts) + ")"

    for node in order:
        if node is d or indeg.get(id(node), 0) < 2:
            continue
        text = render(node)
        flush()
        name = f"@{len(lets) + 1}"
        lines.append(f"(let {name} {text})")
        lets[id(node)] = name
    text = render(d)
    flush()
    lines.append(text)
    return "\n".join(lines) + "\n"


_ARITY = {"hyp": 1, "extra": 0, "spec": 3, "ind": 3, "mp": 2, "exists": 2}


@deep
def read_derivation(text: str, base: AxiomBase = EMPTY_BASE) -> Derivation:
    """Parse a derivation file and rebuild the conclusions; rule errors raise ``InvalidRule``."""
    items = parse_sexpr(text)
    if not items:
        raise SexprError("empty derivation file", 0)
    reader = SyntaxReader()
    lets: dict[str, Derivation] = {}

    def syntax(tok, kind):
        if not isinstance(tok, _Str):
            raise SexprError("expected a quoted formula or term", getattr(tok, "pos", 0))
        try:
            return reader.fm(tok) if kind == "F" else reader.tm(tok)
        except ParseError as exc:
            raise SexprError(f"in quoted syntax: {exc}", tok.pos) from None

    def name(tok):
        if not isinstance(tok, _Atom):
            raise SexprError("expected a name", getattr(tok, "pos", 0))
        return str(tok)

    def build(x) -> Derivation:
        if isinstance(x, _Atom) and x.startswith("@"):
            if x not in lets:
                raise SexprError(f"undefined derivation {x}", x.pos)
            return lets[x]
        if not isinstance(x, _List) or not x or not isinstance(x[0], _Atom):
            raise SexprError("expected a derivation", getattr(x, "pos", 0))
        head, rest = str(x[0]), x[1:]
        if head in _ARITY and len(rest) != _ARITY[head]:
            raise SexprError(f"{head} takes {_ARITY[head]} arguments", x.pos)
        if head == "hyp":
            args, children = (syntax(rest[0], "F"),), ()
        elif head == "extra":
            args, children = (), ()
        elif head in ("bool", "eqax", "hfax"):
            if not rest:
                raise SexprError(f"{head} needs a schema id", x.pos)
            kind = "F" if head == "bool" else "T"
            args, children = (name(rest[0]), *(syntax(r, kind) for r in rest[1:])), ()
        elif head == "spec":
            args, children = (syntax(rest[0], "F"), name(rest[1]), syntax(rest[2], "T")), ()
        elif head == "ind":
            args, children = (syntax(rest[0], "F"), name(rest[1]), name(rest[2])), ()
        elif head == "mp":
            args, children = (), (build(rest[0]), build(rest[1]))
        elif head == "exists":
            args, children = (name(rest[1]),), (build(rest[0]),)
        else:
            raise SexprError(f"unknown node {head!r}", x.pos)
        return Derivation(head, args, children, None, None)

    for item in items[:-1]:
        if not isinstance(item, _List) or len(item) != 3 or item[0] not in ("def", "let"):
            raise SexprError("expected (def ...) or (let ...)", getattr(item, "pos", 0))
        key = str(item[1])
        if item[0] == "def":
            if not isinstance(item[2], _Str):
                raise SexprError("definition body must be quoted", item.pos)
            try:
                reader.define(key, item[2])
            except ParseError as exc:
                raise SexprError(f"in definition {key}: {exc}", item.pos) from None
        else:
            if not key.startswith("@"):
                raise SexprError("derivation names start with @", item.pos)
            lets[key] = build(item[2])
    return reconstruct(build(items[-1]), base)
