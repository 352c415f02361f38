"""First-order terms, atoms, clauses and substitutions.

Terms are immutable values.  A variable is identified by its ``(name, index)``
pair: index 0 marks a variable as written in the source, a positive index marks
a standardized-apart copy.  Lists use the reserved functors ``'.'/2`` and
``'[]'/0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Union

CONS = "."
NIL = "[]"


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    index: int = 0

    def substitute(self, s: Substitution) -> Term:
        return s.get(self, self)

    def __str__(self) -> str:
        return self.name if self.index == 0 else f"{self.name}_{self.index}"


@dataclass(frozen=True, slots=True)
class Struct:
    functor: str
    args: tuple[Term, ...] = ()
    # ground subterms are shared untouched by substitution
    ground: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "ground", all(isinstance(a, Struct) and a.ground for a in self.args))

    @property
    def arity(self) -> int:
        return len(self.args)

    def substitute(self, s: Substitution) -> Term:
        if self.ground:
            return self
        return Struct(self.functor, tuple(a.substitute(s) for a in self.args))

    def __str__(self) -> str:
        if self.functor == NIL and not self.args:
            return "[]"
        if self.functor == CONS and len(self.args) == 2:
            return _format_list(self)
        if not self.args:
            return self.functor
        return f"{self.functor}({','.join(str(a) for a in self.args)})"


Term = Union[Var, Struct]


def _format_list(t: Struct) -> str:
    # proper lists print flat; a list with an open tail keeps the nested [H|T] form
    items: list[Term] = []
    tail: Term = t
    while isinstance(tail, Struct) and tail.functor == CONS and tail.arity == 2:
        items.append(tail.args[0])
        tail = tail.args[1]
    if tail == Struct(NIL):
        return "[" + ", ".join(str(i) for i in items) + "]"
    return f"[{t.args[0]}|{t.args[1]}]"


def make_list(items: Iterable[Term], tail: Term | None = None) -> Term:
    result: Term = tail if tail is not None else Struct(NIL)
    for item in reversed(list(items)):
        result = Struct(CONS, (item, result))
    return result


@dataclass(frozen=True, slots=True)
class Atom:
    predicate: str
    args: tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def key(self) -> tuple[str, int]:
        return (self.predicate, len(self.args))

    def substitute(self, s: Substitution) -> Atom:
        if not self.args:
            return self
        return Atom(self.predicate, tuple(a.substitute(s) for a in self.args))

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Clause:
    head: Atom
    body: tuple[Atom, ...] = ()
    index: int = 0

    def substitute(self, s: Substitution) -> Clause:
        return Clause(self.head.substitute(s), tuple(b.substitute(s) for b in self.body), self.index)

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(b) for b in self.body)}."


@dataclass(frozen=True)
class Program:
    clauses: tuple[Clause, ...]
    coinductive: frozenset[tuple[str, int]] = frozenset()
    warnings: tuple = field(default=(), compare=False)

    @cached_property
    def by_predicate(self) -> dict[tuple[str, int], tuple[Clause, ...]]:
        table: dict[tuple[str, int], list[Clause]] = {}
        for c in self.clauses:
            table.setdefault(c.head.key, []).append(c)
        return {k: tuple(v) for k, v in table.items()}

    def clauses_for(self, atom: Atom) -> tuple[Clause, ...]:
        return self.by_predicate.get(atom.key, ())

    def clause(self, index: int) -> Clause:
        return self.clauses[index - 1]

    def is_coinductive(self, atom: Atom) -> bool:
        return atom.key in self.coinductive

    def __str__(self) -> str:
        lines = [f":- coinductive {name}/{arity}." for name, arity in sorted(self.coinductive)]
        lines += [str(c) for c in self.clauses]
        return "\n".join(lines) + "\n"


class Substitution(Mapping[Var, Term]):
    """Finite map from variables to terms.  Identity bindings are dropped."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Mapping[Var, Term] | Iterable[tuple[Var, Term]] = ()):
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        self._bindings = {v: t for v, t in items if v != t}

    def __getitem__(self, v: Var) -> Term:
        return self._bindings[v]

    def __iter__(self) -> Iterator[Var]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __hash__(self) -> int:
        return hash(frozenset(self._bindings.items()))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Substitution):
            return self._bindings == other._bindings
        return NotImplemented

    def restrict(self, variables: Iterable[Var]) -> Substitution:
        keep = set(variables)
        return Substitution({v: t for v, t in self._bindings.items() if v in keep})

    def is_idempotent(self) -> bool:
        rng: set[Var] = set()
        for t in self._bindings.values():
            rng.update(term_vars(t))
        return rng.isdisjoint(self._bindings)

    def __str__(self) -> str:
        pairs = sorted(self._bindings.items(), key=lambda kv: (kv[0].index, kv[0].name))
        return "{" + ", ".join(f"{v}/{t}" for v, t in pairs) + "}"

    __repr__ = __str__


EMPTY = Substitution()


def apply(s: Substitution, x):
    """Replace every bound variable of ``x`` simultaneously.

    Works on terms, atoms, clauses and anything else exposing ``substitute``
    (coinductive trees included).
    """
    if not s:
        return x
    return x.substitute(s)


def compose(s1: Substitution, s2: Substitution) -> Substitution:
    """The substitution that applies ``s1`` and then ``s2``.

    Chains through ``s2`` are resolved eagerly, so the result is idempotent
    whenever no variable of ``s2``'s range is bound by ``s1`` (the situation
    along every derivation, where ``s2`` only binds variables still free after
    ``s1``).
    """
    out = {v: apply(s2, t) for v, t in s1.items()}
    for v, t in s2.items():
        if v not in out:
            out[v] = t
    return Substitution(out)


def term_vars(x) -> tuple[Var, ...]:
    """Variables of a term, atom or clause in order of first occurrence."""
    seen: dict[Var, None] = {}
    _collect(x, seen)
    return tuple(seen)


def _collect(x, seen: dict[Var, None]) -> None:
    if isinstance(x, Var):
        seen.setdefault(x, None)
    elif isinstance(x, Struct):
        if not x.ground:
            for a in x.args:
                _collect(a, seen)
    elif isinstance(x, Atom):
        for a in x.args:
            _collect(a, seen)
    elif isinstance(x, Clause):
        _collect(x.head, seen)
        for b in x.body:
            _collect(b, seen)
    else:
        for item in x:
            _collect(item, seen)


def _walk(t: Term, bindings: dict[Var, Term]) -> Term:
    while isinstance(t, Var) and t in bindings:
        t = bindings[t]
    return t


def _occurs(v: Var, t: Term, bindings: dict[Var, Term]) -> bool:
    t = _walk(t, bindings)
    if t == v:
        return True
    if isinstance(t, Struct):
        return any(_occurs(v, a, bindings) for a in t.args)
    return False


def _resolve(t: Term, bindings: dict[Var, Term]) -> Term:
    t = _walk(t, bindings)
    if isinstance(t, Struct) and t.args:
        return Struct(t.functor, tuple(_resolve(a, bindings) for a in t.args))
    return t


def unify_terms(pairs: Iterable[tuple[Term, Term]]) -> Substitution | None:
    """Most general unifier of a system of term equations, with occurs check.

    When two variables meet, the one with the higher rename index is bound
    (ties bind the right-hand one), so fresh clause variables are bound in
    preference to goal variables.
    """
    bindings: dict[Var, Term] = {}
    stack = list(pairs)
    stack.reverse()
    while stack:
        x, y = stack.pop()
        x = _walk(x, bindings)
        y = _walk(y, bindings)
        if x == y:
            continue
        if isinstance(x, Var) and isinstance(y, Var):
            if y.index >= x.index:
                bindings[y] = x
            else:
                bindings[x] = y
        elif isinstance(x, Var):
            if _occurs(x, y, bindings):
                return None
            bindings[x] = y
        elif isinstance(y, Var):
            if _occurs(y, x, bindings):
                return None
            bindings[y] = x
        else:
            if x.functor != y.functor or len(x.args) != len(y.args):
                return None
            stack.extend(reversed(list(zip(x.args, y.args))))
    return Substitution({v: _resolve(t, bindings) for v, t in bindings.items()})


def unify(a: Atom, b: Atom) -> Substitution | None:
    """Most general unifier of two atoms, or ``None``."""
    if a.predicate != b.predicate or len(a.args) != len(b.args):
        return None
    return unify_terms(zip(a.args, b.args))


def term_match(goal: Atom, pattern: Atom) -> Substitution | None:
    """One-sided unifier: ``theta`` with ``goal == apply(theta, pattern)``.

    Only the pattern's variables may be bound; the goal's variables behave
    as constants.
    """
    if goal.predicate != pattern.predicate or len(goal.args) != len(pattern.args):
        return None
    bindings: dict[Var, Term] = {}
    stack = list(zip(goal.args, pattern.args))
    while stack:
        g, p = stack.pop()
        if isinstance(p, Var):
            bound = bindings.get(p)
            if bound is None:
                bindings[p] = g
            elif bound != g:
                return None
        elif isinstance(g, Var):
            return None
        elif g.functor != p.functor or len(g.args) != len(p.args):
            return None
        else:
            stack.extend(zip(g.args, p.args))
    return Substitution(bindings)


def rename_apart(c: Clause, index: int) -> Clause:
    """Copy of ``c`` whose variables all carry rename index ``index``."""
    mapping = {v: Var(v.name, index) for v in term_vars(c)}
    return c.substitute(Substitution(mapping))


def max_index(x) -> int:
    return max((v.index for v in term_vars(x)), default=0)


def variant_key(x) -> str:
    """Rendering of ``x`` with variables numbered by first occurrence.

    Two values have the same key exactly when they are variants.
    """
    mapping = {v: Var("_V", -i) for i, v in enumerate(term_vars(x), start=1)}
    return str(x.substitute(Substitution(mapping)))
