"""Tarski evaluation over the executable HF model.

Quantifiers range over all hereditarily finite sets, so an existential can
only be settled by finding a witness or by knowing that no witness can exist.
The evaluator gets definite answers in three ways:

* guards: if the body can only be true for values of the bound variable in a
  finite, computable set (``x IN t``, ``x = t``, ``t = (x <| u)`` and the like),
  only those values are tried and the search is complete;
* hints: witnesses supplied by the caller for particular ``Ex`` nodes,
  addressed by path (child index 0/1 under ``|``, 0 under ``~`` and ``Ex``);
* budget: otherwise sets are tried in ascending Ackermann order below the
  budget, and an unsuccessful search yields :class:`BudgetExhausted` (or
  False when ``closed_world`` says the budget is the whole universe).
"""

from __future__ import annotations

from typing import Iterable, Mapping

from hfproof._deep import deep
from hfproof.hf_model import HfSet, NotAPair, eats, empty, from_ack_index, member, remove, unpair
from hfproof.syntax import Bound, Disj, Eats, Eq, Ex, Formula, Mem, Neg, Term, Var, Zero

__all__ = [
    "BudgetExhausted",
    "Undecided",
    "Evaluator",
    "eval_tm",
    "eval_fm",
    "holds_sigma",
    "parse_path",
    "DEFAULT_BUDGET",
    "DEFAULT_SIGMA_CAP",
]

DEFAULT_BUDGET = 1 << 8
DEFAULT_SIGMA_CAP = 1 << 20
# guard domains larger than this are abandoned in favour of blind search
_DOMAIN_LIMIT = 200_000
_EMPTY = empty()


class BudgetExhausted:
    """Inconclusive outcome: search below ``budget`` found nothing definite."""

    __slots__ = ("budget",)

    def __init__(self, budget: int):
        self.budget = budget

    def __bool__(self):
        raise TypeError("BudgetExhausted is not a truth value")

    def __eq__(self, other):
        return isinstance(other, BudgetExhausted) and other.budget == self.budget

    def __hash__(self):
        return hash(("BudgetExhausted", self.budget))

    def __repr__(self) -> str:
        return f"BudgetExhausted({self.budget})"


class Undecided(RuntimeError):
    def __init__(self, cap: int):
        super().__init__(f"search cap {cap} reached without a decision")
        self.cap = cap


def parse_path(text: str) -> tuple[int, ...]:
    text = text.strip()
    if text in ("", "."):
        return ()
    return tuple(int(p) for p in text.split("."))


def _uses(t: Term, lo: int, hi: int) -> bool:
    """Whether ``t`` mentions a bound index in ``[lo, hi]``."""
    if t.level <= lo:
        return False
    cls = type(t)
    if cls is Bound:
        return lo <= t.index <= hi
    if cls is Eats:
        return _uses(t.left, lo, hi) or _uses(t.right, lo, hi)
    return False


def _mentions(t: Term, k: int) -> bool:
    return _uses(t, k, k)


def _pair_parts(e: Eats):
    """``(a, b)`` when ``e`` has the shape of the pair term for ``a`` and ``b``."""
    left, right = e.left, e.right
    if type(left) is not Eats or type(right) is not Eats or type(left.left) is not Zero:
        return None
    single = left.right
    if type(single) is not Eats or type(single.left) is not Zero or right.left is not single:
        return None
    return single.right, right.right


class Evaluator:
    """One evaluation context: environment, budget, hints and caches."""

    def __init__(
        self,
        env: Mapping[str, HfSet] | None = None,
        budget: int = DEFAULT_BUDGET,
        hints: Mapping | None = None,
        closed_world: bool = False,
        strict_hints: bool = False,
    ):
        if budget < 1:
            raise ValueError("budget must be at least 1")
        self.env = dict(env or {})
        self.budget = budget
        self.hints = {}
        for path, value in (hints or {}).items():
            if isinstance(path, str):
                path = parse_path(path)
            self.hints[tuple(path)] = list(value) if isinstance(value, (list, tuple)) else [value]
        self.hint_prefixes = {p[:k] for p in self.hints for k in range(len(p) + 1)}
        self.closed_world = closed_world
        self.strict_hints = strict_hints
        self._tm_memo: dict = {}
        self._fm_memo: dict = {}
        self._cost: dict = {}
        self._global: list[HfSet] | None = None

    # terms ------------------------------------------------------------------

    def term(self, t: Term, stack: tuple = ()) -> HfSet:
        if t.level == 0:
            v = self._tm_memo.get(t)
            if v is None:
                v = self._term(t, ())
                self._tm_memo[t] = v
            return v
        return self._term(t, stack)

    def _term(self, t: Term, stack: tuple) -> HfSet:
        cls = type(t)
        if cls is Eats:
            return eats(self.term(t.left, stack), self.term(t.right, stack))
        if cls is Zero:
            return _EMPTY
        if cls is Var:
            return self.env.get(t.name, _EMPTY)
        return stack[-1 - t.index]

    # formulas -----------------------------------------------------------------

    def formula(self, a: Formula, stack: tuple = (), path=()):
        hinted = path is not None and path in self.hint_prefixes
        if not hinted:
            key = (a, stack[len(stack) - a.level :]) if a.level else a
            hit = self._fm_memo.get(key)
            if hit is not None:
                return hit
        r = self._formula(a, stack, path, hinted)
        if not hinted:
            if len(self._fm_memo) > 2_000_000:
                self._fm_memo.clear()
            self._fm_memo[key] = r
        return r

    def _formula(self, a: Formula, stack: tuple, path, hinted: bool):
        cls = type(a)
        if cls is Mem:
            return member(self.term(a.left, stack), self.term(a.right, stack))
        if cls is Eq:
            return self.term(a.left, stack) is self.term(a.right, stack)
        if cls is Neg:
            r = self.formula(a.body, stack, path + (0,) if hinted else None)
            return r if isinstance(r, BudgetExhausted) else not r
        if cls is Disj:
            sides = [(a.left, 0), (a.right, 1)]
            if self.cost(a.right) < self.cost(a.left):
                sides.reverse()
            pending = None
            for side, k in sides:
                r = self.formula(side, stack, path + (k,) if hinted else None)
                if r is True:
                    return True
                if r is not False:
                    pending = r
            return False if pending is None else pending
        return self._exists(a, stack, path, hinted)

    def _exists(self, a: Ex, stack: tuple, path, hinted: bool):
        body = a.body
        sub = path + (0,) if hinted else None
        pending = None
        tried: set = set()
        if hinted and path in self.hints:
            for v in self.hints[path]:
                tried.add(v)
                r = self.formula(body, stack + (v,), sub)
                if r is True:
                    return True
                if r is not False:
                    pending = r
            if self.strict_hints:
                return False if pending is None else pending
        domain = self.domain(body, stack)
        if domain is not None:
            for v in domain:
                if v in tried:
                    continue
                tried.add(v)
                r = self.formula(body, stack + (v,), sub)
                if r is True:
                    return True
                if r is not False:
                    pending = r
            return False if pending is None else pending
        for v in self.candidates(body, stack):
            if v in tried:
                continue
            tried.add(v)
            r = self.formula(body, stack + (v,), sub)
            if r is True:
                return True
            if r is not False:
                pending = r
        for n in range(self.budget):
            v = from_ack_index(n)
            if v in tried:
                continue
            r = self.formula(body, stack + (v,), sub)
            if r is True:
                return True
            if r is not False:
                pending = r
        if pending is None and self.closed_world:
            return False
        return pending if pending is not None else BudgetExhausted(self.budget)

    def cost(self, a: Formula) -> int:
        """Rough work estimate: number of quantifiers below ``a``."""
        c = self._cost.get(a)
        if c is None:
            cls = type(a)
            if cls is Mem or cls is Eq:
                c = 0
            elif cls is Neg:
                c = self.cost(a.body)
            elif cls is Disj:
                c = self.cost(a.left) + self.cost(a.right)
            else:
                c = 1 + 4 * self.cost(a.body)
            self._cost[a] = c
        return c

    # witness domains ------------------------------------------------------------

    def domain(self, body: Formula, stack: tuple) -> list[HfSet] | None:
        """Finite superset of the values making ``body`` true, or None."""
        found = self._dom(body, 0, True, stack)
        if found is None:
            return None
        return sorted(found)

    def _dom(self, a: Formula, d: int, positive: bool, stack: tuple):
        cls = type(a)
        if cls is Neg:
            return self._dom(a.body, d, not positive, stack)
        if cls is Disj:
            left = self._dom(a.left, d, positive, stack)
            if positive:
                if left is None:
                    return None
                right = self._dom(a.right, d, positive, stack)
                if right is None:
                    return None
                out = left | right
                return out if len(out) <= _DOMAIN_LIMIT else None
            if left is not None and len(left) <= 1:
                return left
            right = self._dom(a.right, d, positive, stack)
            if left is None:
                return right
            if right is None:
                return left
            return left if len(left) <= len(right) else right
        if cls is Ex:
            return self._dom(a.body, d + 1, positive, stack) if positive else None
        if not positive or a.level <= d:
            return None
        if cls is Mem:
            if _mentions(a.right, d) or not _mentions(a.left, d):
                return None
            if _uses(a.right, 0, d):
                return None
            return self._solve(a.left, d, self._outer(a.right, d, stack).elements, stack)
        # Eq
        for lhs, rhs in ((a.left, a.right), (a.right, a.left)):
            if _mentions(lhs, d) and not _uses(rhs, 0, d):
                return self._solve(lhs, d, (self._outer(rhs, d, stack),), stack)
        return None

    def _outer(self, t: Term, d: int, stack: tuple) -> HfSet:
        # t mentions only binders outside the one being solved for
        if t.level == 0:
            return self.term(t)
        return self._term(t, stack + (_EMPTY,) * (d + 1))

    def _solve(self, e: Term, d: int, values: Iterable[HfSet], stack: tuple):
        """Possible values of index ``d`` given that ``e`` evaluates into ``values``."""
        cls = type(e)
        if cls is Bound:
            return set(values) if e.index == d else None
        if cls is not Eats:
            return None
        if type(e.left) is Bound and e.left is e.right and e.left.index == d:
            # x <| x = v forces x to be the largest member of v
            return {v.elements[-1] for v in values if len(v)}
        parts = _pair_parts(e)
        if parts is not None:
            # Kuratowski pair: read the components off directly
            first, second = parts
            side = 0 if _mentions(first, d) else 1
            comps = set()
            for v in values:
                try:
                    comps.add(unpair(v)[side])
                except NotAPair:
                    pass
            return self._solve(parts[side], d, comps, stack)
        if _mentions(e.right, d):
            inner: set = set()
            for v in values:
                inner.update(v.elements)
                if len(inner) > _DOMAIN_LIMIT:
                    return None
            return self._solve(e.right, d, inner, stack)
        known = None
        if not _uses(e.right, 0, d):
            known = e.right
        options: set = set()
        for v in values:
            options.add(v)
            if known is not None:
                options.add(remove(v, self._outer(known, d, stack)))
            else:
                options.update(remove(v, m) for m in v.elements)
            if len(options) > _DOMAIN_LIMIT:
                return None
        return self._solve(e.left, d, options, stack)

    # candidate witnesses --------------------------------------------------------

    def candidates(self, body: Formula, stack: tuple) -> list[HfSet]:
        out: dict = {}
        if self._global is None:
            self._global = []
        for v in self._global:
            out[v] = None
        self._collect(body, 0, stack, out, set())
        return list(out)

    def _collect(self, a, d, stack, out, seen):
        if (a, d) in seen or len(out) > 64:
            return
        seen.add((a, d))
        cls = type(a)
        if cls is Mem or cls is Eq:
            for t in (a.left, a.right):
                if not _uses(t, 0, d):
                    v = self._outer(t, d, stack)
                    out[v] = None
                    for m in v.elements[:16]:
                        out[m] = None
        elif cls is Disj:
            self._collect(a.left, d, stack, out, seen)
            self._collect(a.right, d, stack, out, seen)
        elif cls is Neg:
            self._collect(a.body, d, stack, out, seen)
        else:
            self._collect(a.body, d + 1, stack, out, seen)

    def prime(self, root: Formula):
        """Remember the values of the closed terms of ``root`` as global candidates."""
        values: dict = {}
        seen = set()
        todo = [root]
        while todo and len(values) < 64:
            a = todo.pop()
            if a in seen:
                continue
            seen.add(a)
            cls = type(a)
            if cls is Mem or cls is Eq:
                for t in (a.left, a.right):
                    if t.level == 0:
                        values[self.term(t)] = None
            elif cls is Disj:
                todo += [a.left, a.right]
            else:
                todo.append(a.body)
        self._global = list(values)


@deep
def eval_tm(env: Mapping[str, HfSet] | None, t: Term) -> HfSet:
    if t.level:
        raise ValueError("term is not locally closed")
    return Evaluator(env).term(t)


@deep
def eval_fm(
    env: Mapping[str, HfSet] | None,
    a: Formula,
    budget: int = DEFAULT_BUDGET,
    hints: Mapping | None = None,
    *,
    closed_world: bool = False,
    strict_hints: bool = False,
):
    """Truth of ``a``: True, False or a :class:`BudgetExhausted` value."""
    if a.level:
        raise ValueError("formula is not locally closed")
    ev = Evaluator(env, budget, hints, closed_world=closed_world, strict_hints=strict_hints)
    ev.prime(a)
    return ev.formula(a)


@deep
def holds_sigma(env: Mapping[str, HfSet] | None, a: Formula, cap: int = DEFAULT_SIGMA_CAP) -> bool:
    """Decide a Σ formula; raises :class:`Undecided` if ``cap`` sets did not settle it."""
    r = eval_fm(env, a, budget=cap)
    if isinstance(r, BudgetExhausted):
        raise Undecided(cap)
    return r
