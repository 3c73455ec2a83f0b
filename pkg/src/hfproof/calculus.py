"""Hilbert-style proof kernel for the HF calculus.

A :class:`Derivation` is an explicit proof DAG.  Every node stores its
conclusion and the (minimal) set of hypotheses it depends on; :func:`check`
never trusts those fields and recomputes them from the rule, its arguments
and the children.

Rules::

    hyp A                      {A} |- A
    extra                      |- the configured extra axiom
    bool B1..B4, eqax E1..E5   |- schema instance
    hfax HF1, HF2              |- HF axiom instance
    spec A i t                 |- A(i::=t) -> Ex i. A
    ind A i j                  |- induction instance
    mp  (H |- A -> B) (H' |- A)            H u H' |- B
    exists (H |- A -> B) i     H |- (Ex i. A) -> B      (i not free in B, H)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from hfproof._deep import deep
from hfproof.syntax import (
    ZERO,
    All,
    And,
    Eats,
    Eq,
    Formula,
    Iff,
    Imp,
    Mem,
    Neg,
    Or,
    Term,
    Var,
    fresh_name,
    is_name,
    match_imp,
    mk_ex,
    subst_fm,
)

__all__ = [
    "Derivation",
    "Judgment",
    "AxiomBase",
    "InvalidRule",
    "ArityMismatch",
    "NonFreshName",
    "ExtraAxiomRejected",
    "BOOL_SCHEMAS",
    "EQ_SCHEMAS",
    "HF_SCHEMAS",
    "axiom_instance",
    "hf1",
    "hf2",
    "induction",
    "special",
    "hyp",
    "extra",
    "bool_ax",
    "eq_ax",
    "hf_ax",
    "spec",
    "ind",
    "mp",
    "exists",
    "check",
    "nodes",
    "reconstruct",
    "EMPTY_BASE",
]


class InvalidRule(ValueError):
    """A node is not a correct rule application.  ``path`` lists child indices from the root."""

    def __init__(self, path: Sequence[int], reason: str, detail: str = ""):
        where = ".".join(map(str, path)) or "root"
        super().__init__(f"{reason} at {where}" + (f": {detail}" if detail else ""))
        self.path = tuple(path)
        self.reason = reason
        self.detail = detail


class ArityMismatch(ValueError):
    pass


class NonFreshName(ValueError):
    pass


class ExtraAxiomRejected(ValueError):
    pass


@dataclass(frozen=True)
class Judgment:
    hyps: frozenset
    concl: Formula

    def __str__(self) -> str:
        from hfproof.grammar import print_fm

        left = ", ".join(sorted(print_fm(h) for h in self.hyps))
        return f"{left} |- {print_fm(self.concl)}" if left else f"|- {print_fm(self.concl)}"


# axiom schemas ----------------------------------------------------------------

BOOL_SCHEMAS = {"B1": 1, "B2": 2, "B3": 2, "B4": 3}
EQ_SCHEMAS = {"E1": 1, "E2": 3, "E3": 3, "E4": 3, "E5": 4}
HF_SCHEMAS = {"HF1": 1, "HF2": 3}


def _bool_instance(schema: str, parts: Sequence[Formula]) -> Formula:
    _arity(schema, parts, BOOL_SCHEMAS)
    if schema == "B1":
        (a,) = parts
        return Imp(Or(a, a), a)
    if schema == "B2":
        a, b = parts
        return Imp(a, Or(a, b))
    if schema == "B3":
        a, b = parts
        return Imp(Or(a, b), Or(b, a))
    a, b, c = parts
    return Imp(Imp(b, c), Imp(Or(a, b), Or(a, c)))


def _eq_instance(schema: str, parts: Sequence[Term]) -> Formula:
    _arity(schema, parts, EQ_SCHEMAS)
    if schema == "E1":
        (x,) = parts
        return Eq(x, x)
    if schema == "E5":
        x, x2, y, y2 = parts
        return Imp(Eq(x, x2), Imp(Eq(y, y2), Eq(Eats(x, y), Eats(x2, y2))))
    x, y, z = parts
    if schema == "E2":
        return Imp(Eq(x, y), Imp(Eq(x, z), Eq(y, z)))
    if schema == "E3":
        return Imp(Eq(x, y), Imp(Mem(z, x), Mem(z, y)))
    return Imp(Eq(x, y), Imp(Mem(x, z), Mem(y, z)))


def hf1(z: Term) -> Formula:
    """``z = 0 <-> All x. ~ x IN z``."""
    x = fresh_name(z.fv, "x")
    return Iff(Eq(z, ZERO), All(x, Neg(Mem(Var(x), z))))


def hf2(z: Term, x: Term, y: Term) -> Formula:
    """``z = x <| y <-> All u. (u IN z <-> u IN x | u = y)``."""
    u = fresh_name(z.fv | x.fv | y.fv, "u")
    vu = Var(u)
    return Iff(Eq(z, Eats(x, y)), All(u, Iff(Mem(vu, z), Or(Mem(vu, x), Eq(vu, y)))))


def _hf_instance(schema: str, parts: Sequence[Term]) -> Formula:
    _arity(schema, parts, HF_SCHEMAS)
    return hf1(*parts) if schema == "HF1" else hf2(*parts)


def special(a: Formula, i: str, t: Term) -> Formula:
    return Imp(subst_fm(a, i, t), mk_ex(i, a))


def induction(a: Formula, i: str, j: str) -> Formula:
    """``A(i::=0) & (All i. All j. A & A(i::=j) -> A(i::=i <| j)) -> All i. A``."""
    if i == j:
        raise NonFreshName("induction needs two distinct names")
    if j in a.fv:
        raise NonFreshName(f"{j} occurs free in the induction formula")
    vi, vj = Var(i), Var(j)
    step = All(i, All(j, Imp(And(a, subst_fm(a, i, vj)), subst_fm(a, i, Eats(vi, vj)))))
    return Imp(And(subst_fm(a, i, ZERO), step), All(i, a))


def _arity(schema, parts, table):
    if schema not in table:
        raise ArityMismatch(f"unknown schema {schema}")
    if len(parts) != table[schema]:
        raise ArityMismatch(f"{schema} takes {table[schema]} parts, got {len(parts)}")


def axiom_instance(schema: str, parts: Sequence) -> Formula:
    """Instance of a named schema: B1-B4, E1-E5, HF1, HF2, Special or Ind."""
    if schema in BOOL_SCHEMAS:
        _kinds(parts, Formula)
        return _bool_instance(schema, parts)
    if schema in EQ_SCHEMAS:
        _kinds(parts, Term)
        return _eq_instance(schema, parts)
    if schema in HF_SCHEMAS:
        _kinds(parts, Term)
        return _hf_instance(schema, parts)
    if schema == "Special":
        if len(parts) != 3:
            raise ArityMismatch("Special takes a formula, a name and a term")
        return special(*parts)
    if schema == "Ind":
        if len(parts) != 3:
            raise ArityMismatch("Ind takes a formula and two names")
        return induction(*parts)
    raise ArityMismatch(f"unknown schema {schema}")


def _kinds(parts, cls):
    for p in parts:
        if not isinstance(p, cls):
            raise ArityMismatch(f"expected {cls.__name__} parts")
        if p.level:
            raise ArityMismatch("schema parts must be locally closed")


# derivations ------------------------------------------------------------------


class Derivation:
    """Immutable proof node.  Build with the rule functions below."""

    __slots__ = ("rule", "args", "children", "concl", "hyps", "__weakref__")

    def __init__(self, rule: str, args: tuple, children: tuple, concl: Formula, hyps: frozenset):
        self.rule = rule
        self.args = args
        self.children = children
        self.concl = concl
        self.hyps = hyps

    @property
    def judgment(self) -> Judgment:
        return Judgment(self.hyps, self.concl)

    def __repr__(self) -> str:
        return f"<Derivation {self.rule}: {self.judgment}>"


_NONE: frozenset = frozenset()


def hyp(a: Formula) -> Derivation:
    return Derivation("hyp", (a,), (), a, frozenset((a,)))


def extra(base: AxiomBase) -> Derivation:
    if base.extra is None:
        raise ValueError("no extra axiom configured")
    return Derivation("extra", (), (), base.extra, _NONE)


def bool_ax(schema: str, *parts: Formula) -> Derivation:
    return Derivation("bool", (schema, *parts), (), _bool_instance(schema, parts), _NONE)


def eq_ax(schema: str, *parts: Term) -> Derivation:
    return Derivation("eqax", (schema, *parts), (), _eq_instance(schema, parts), _NONE)


def hf_ax(schema: str, *parts: Term) -> Derivation:
    return Derivation("hfax", (schema, *parts), (), _hf_instance(schema, parts), _NONE)


def spec(a: Formula, i: str, t: Term) -> Derivation:
    return Derivation("spec", (a, i, t), (), special(a, i, t), _NONE)


def ind(a: Formula, i: str, j: str) -> Derivation:
    return Derivation("ind", (a, i, j), (), induction(a, i, j), _NONE)


def mp(major: Derivation, minor: Derivation) -> Derivation:
    """From ``A -> B`` and ``A`` conclude ``B``."""
    parts = match_imp(major.concl)
    if parts is None or parts[0] is not minor.concl:
        raise ValueError(f"modus ponens mismatch: {major.concl!r} applied to {minor.concl!r}")
    return Derivation("mp", (), (major, minor), parts[1], major.hyps | minor.hyps)


def exists(sub: Derivation, i: str) -> Derivation:
    """From ``A -> B`` conclude ``(Ex i. A) -> B``."""
    parts = match_imp(sub.concl)
    if parts is None:
        raise ValueError("exists rule needs an implication")
    a, b = parts
    if i in b.fv or any(i in h.fv for h in sub.hyps):
        raise ValueError(f"{i} is not fresh for the exists rule")
    return Derivation("exists", (i,), (sub,), Imp(mk_ex(i, a), b), sub.hyps)


# axiom base --------------------------------------------------------------------


class AxiomBase:
    """The theory's parameters: currently the optional extra axiom."""

    def __init__(self, extra: Formula | None = None, validate: bool = True, samples: int = 30, seed: int = 0):
        self.extra = extra
        if extra is not None:
            if extra.level:
                raise ExtraAxiomRejected("extra axiom is not locally closed")
            if validate:
                self._validate(samples, seed)

    def _validate(self, samples: int, seed: int):
        import random

        from hfproof.hf_model import from_ack_index
        from hfproof.semantics import BudgetExhausted, eval_fm

        rng = random.Random(seed)
        names = sorted(self.extra.fv)
        for _ in range(samples):
            env = {n: from_ack_index(rng.randrange(1 << 12)) for n in names}
            r = eval_fm(env, self.extra, budget=1 << 12, closed_world=True)
            if r is False:
                raise ExtraAxiomRejected(f"extra axiom is false under {env}")
            if isinstance(r, BudgetExhausted):
                raise ExtraAxiomRejected("extra axiom could not be evaluated")

    def __repr__(self) -> str:
        return f"AxiomBase(extra={self.extra!r})"


EMPTY_BASE = AxiomBase()


# checker -----------------------------------------------------------------------


def _recompute(d: Derivation, path: list, base: AxiomBase, memo: dict, fill: bool = False) -> tuple[Formula, frozenset]:
    hit = memo.get(id(d))
    if hit is not None:
        return hit
    rule = d.rule
    args = d.args

    def fail(reason, detail=""):
        raise InvalidRule(path, reason, detail)

    if not isinstance(d, Derivation):
        fail("malformed", "not a derivation node")
    expect_children = {"mp": 2, "exists": 1}.get(rule, 0)
    if len(d.children) != expect_children:
        fail("malformed", f"{rule} takes {expect_children} premises")
    try:
        if rule == "hyp":
            (a,) = args
            _closed(a, fail)
            concl, hyps = a, frozenset((a,))
        elif rule == "extra":
            if args:
                fail("malformed")
            if base.extra is None:
                fail("no-extra-axiom")
            concl, hyps = base.extra, _NONE
        elif rule in ("bool", "eqax", "hfax"):
            schema, *parts = args
            table = {"bool": BOOL_SCHEMAS, "eqax": EQ_SCHEMAS, "hfax": HF_SCHEMAS}[rule]
            if schema not in table:
                fail("schema-mismatch", f"unknown {rule} schema {schema}")
            _kinds(parts, Formula if rule == "bool" else Term)
            concl = axiom_instance(schema, parts)
            hyps = _NONE
        elif rule == "spec":
            a, i, t = args
            _closed(a, fail)
            _closed(t, fail)
            _name(i, fail)
            concl, hyps = special(a, i, t), _NONE
        elif rule == "ind":
            a, i, j = args
            _closed(a, fail)
            _name(i, fail)
            _name(j, fail)
            try:
                concl = induction(a, i, j)
            except NonFreshName as exc:
                fail("freshness", str(exc))
            hyps = _NONE
        elif rule == "mp":
            path.append(0)
            major, h1 = _recompute(d.children[0], path, base, memo, fill)
            path[-1] = 1
            minor, h2 = _recompute(d.children[1], path, base, memo, fill)
            path.pop()
            parts = match_imp(major)
            if parts is None:
                fail("not-an-implication")
            if parts[0] is not minor:
                fail("antecedent-mismatch")
            concl, hyps = parts[1], h1 | h2
        elif rule == "exists":
            (i,) = args
            _name(i, fail)
            path.append(0)
            sub, hyps = _recompute(d.children[0], path, base, memo, fill)
            path.pop()
            parts = match_imp(sub)
            if parts is None:
                fail("not-an-implication")
            a, b = parts
            if i in b.fv:
                fail("freshness", f"{i} occurs free in the conclusion")
            if any(i in h.fv for h in hyps):
                fail("freshness", f"{i} occurs free in a hypothesis")
            concl = Imp(mk_ex(i, a), b)
        else:
            fail("malformed", f"unknown rule {rule!r}")
    except (ArityMismatch, ValueError, TypeError) as exc:
        if isinstance(exc, InvalidRule):
            raise
        fail("schema-mismatch", str(exc))
    if fill:
        d.concl, d.hyps = concl, hyps
    if concl is not d.concl:
        fail("conclusion-mismatch")
    if hyps != d.hyps:
        fail("hypotheses-mismatch")
    memo[id(d)] = (concl, hyps)
    return concl, hyps


def _closed(x, fail):
    if not isinstance(x, (Formula, Term)):
        fail("malformed", "expected syntax")
    if x.level:
        fail("not-locally-closed")


def _name(i, fail):
    if not isinstance(i, str) or not is_name(i):
        fail("malformed", f"bad variable name {i!r}")


@deep
def check(d: Derivation, base: AxiomBase = EMPTY_BASE, hyps: Iterable[Formula] | None = None) -> Judgment:
    """Re-verify ``d`` and return its judgment.

    With ``hyps`` given, the derivation's hypotheses must be among them and the
    returned judgment is stated over ``hyps``.
    """
    concl, used = _recompute(d, [], base, {})
    if hyps is not None:
        allowed = frozenset(hyps)
        missing = used - allowed
        if missing:
            raise InvalidRule((), "hypothesis-not-available", repr(next(iter(missing))))
        return Judgment(allowed, concl)
    return Judgment(used, concl)


@deep
def reconstruct(d: Derivation, base: AxiomBase = EMPTY_BASE) -> Derivation:
    """Fill in the conclusions of raw nodes (e.g. read from a file), validating each rule."""
    _recompute(d, [], base, {}, fill=True)
    return d


def nodes(d: Derivation) -> list[Derivation]:
    """Distinct nodes in post-order (children first)."""
    out: list = []
    seen: set = set()
    stack = [(d, False)]
    while stack:
        node, done = stack.pop()
        if done:
            out.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for child in reversed(node.children):
            stack.append((child, False))
    return out
