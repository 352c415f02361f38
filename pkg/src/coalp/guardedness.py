"""Static guardedness checks run before a program is executed lazily.

GC1 looks at single clauses: a recursive call must consume a constructor.
GC2 builds the coinductive tree of every clause head and applies the GC1
measure to each same-predicate ancestor/descendant pair inside it.  GC3 runs
bounded derivations from every clause head, imposing GC2 on every tree met,
until each branch of the tree is closed by a box or sits under a guarded loop.
"""

from __future__ import annotations

import time
from collections import Counter, deque
from dataclasses import dataclass, field

from .cotree import BUDGET_EXCEEDED, DEFAULT_BUDGET, AndNode, Budget, CoTree, Path, new_cotree, expand_to_budget
from .derivation import Goal, selection_order, derive_step
from .terms import Atom, Clause, Program, Struct, Term, rename_apart, variant_key

GUARDED = "guarded"
UNGUARDED = "unguarded"

DEFAULT_STEP_LIMIT = 50
# total number of derivation goals GC3 may visit per clause head
DEFAULT_GOAL_LIMIT = 5000


@dataclass(frozen=True)
class LoopEvidence:
    predicate: tuple[str, int]
    ancestor: Atom
    descendant: Atom
    guarded: bool

    def __str__(self) -> str:
        kind = "guarded" if self.guarded else "unguarded"
        return f"{kind} loop {self.ancestor} -> {self.descendant}"


@dataclass(frozen=True)
class Verdict:
    """Outcome of one check; truthy when the check passes."""

    ok: bool
    detail: str
    evidence: LoopEvidence | None = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Failure:
    check: str
    subject: str
    detail: str
    evidence: LoopEvidence | None = None


@dataclass
class GuardReport:
    verdict: str
    failures: list[Failure]
    elapsed: float
    lines: list[str] = field(default_factory=list)

    @property
    def guarded(self) -> bool:
        return self.verdict == GUARDED

    def render(self) -> str:
        out = list(self.lines)
        out.append(f"verdict: {self.verdict}")
        out.append(f"gc-time: {self.elapsed:.3f}")
        return "\n".join(out) + "\n"


# GC1


def _symbol(f: tuple[str, int]) -> str:
    name, arity = f
    if f == (".", 2):
        return "[.|.]"
    return f"{name}/{arity}"


def _count(args: tuple[Term, ...]) -> Counter:
    counts: Counter = Counter()
    stack = list(args)
    while stack:
        t = stack.pop()
        if isinstance(t, Struct):
            counts[(t.functor, t.arity)] += 1
            stack.extend(t.args)
    return counts


def _reducing_symbol(head: Atom, calls: list[Atom]) -> tuple[str, int] | None:
    """A function symbol whose count drops from ``head`` to every atom in ``calls``."""
    before = _count(head.args)
    after = [_count(b.args) for b in calls]
    for f in sorted(before):
        if all(c[f] < before[f] for c in after):
            return f
    return None


def gc1_clause(c: Clause) -> Verdict:
    calls = [b for b in c.body if b.key == c.head.key]
    if not calls:
        return Verdict(True, "no recursive call")
    f = _reducing_symbol(c.head, calls)
    if f is None:
        return Verdict(False, f"no function symbol is reduced from {c.head} to {', '.join(map(str, calls))}")
    return Verdict(True, f"guarded by {_symbol(f)}")


def gc1_pair(ancestor: Atom, descendant: Atom) -> Verdict:
    if ancestor.key != descendant.key:
        raise ValueError(f"{ancestor} and {descendant} have different predicates")
    f = _reducing_symbol(ancestor, [descendant])
    evidence = LoopEvidence(ancestor.key, ancestor, descendant, f is not None)
    if f is None:
        return Verdict(False, f"nothing reduced from {ancestor} to {descendant}", evidence)
    return Verdict(True, f"guarded by {_symbol(f)}", evidence)


# GC2


def _pairs(tree: CoTree):
    """Same-predicate (ancestor, descendant) label pairs, in pre-order of the descendant."""
    stack: list[tuple[AndNode, tuple[Atom, ...]]] = [(tree.root, ())]
    while stack:
        node, above = stack.pop()
        for a in above:
            if a.key == node.label.key:
                yield a, node.label
        below = above + (node.label,)
        for o in reversed(node.children):
            for c in reversed(o.children):
                stack.append((c, below))


def _tree_check(tree: CoTree, outcome: str) -> Verdict:
    for a, d in _pairs(tree):
        v = gc1_pair(a, d)
        if not v:
            return v
    if outcome == BUDGET_EXCEEDED:
        return Verdict(False, "coinductive tree exceeds the budget")
    return Verdict(True, "all loops guarded")


def _head_tree(program: Program, c: Clause, budget: Budget) -> tuple[CoTree, str]:
    head = rename_apart(c, 1).head
    return expand_to_budget(program, new_cotree(head), budget)


def gc2_clause(program: Program, c: Clause, budget: Budget = DEFAULT_BUDGET) -> Verdict:
    return _tree_check(*_head_tree(program, c, budget))


def gc2_program(program: Program, budget: Budget = DEFAULT_BUDGET) -> Verdict:
    for c in program.clauses:
        v = gc2_clause(program, c, budget)
        if not v:
            return v
    return Verdict(True, "all loops guarded")


# GC3


def _open_leaves(tree: CoTree) -> list[tuple[Path, AndNode]]:
    """Leaves neither closed by a box nor lying under a same-predicate loop."""
    out = []
    stack: list[tuple[Path, AndNode, frozenset]] = [((), tree.root, frozenset())]
    while stack:
        path, node, keys = stack.pop()
        looped = node.label.key in keys
        if not node.children:
            if not looped:
                out.append((path, node))
            continue
        if looped:
            # the whole subtree hangs below a loop already vetted by the pair check
            continue
        below = keys | {node.label.key}
        for o in reversed(node.children):
            for i in reversed(range(len(o.children))):
                stack.append((path + ((o.clause_index, i),), o.children[i], below))
    return out


def gc3_clause(
    program: Program,
    c: Clause,
    budget: Budget = DEFAULT_BUDGET,
    step_limit: int = DEFAULT_STEP_LIMIT,
    goal_limit: int = DEFAULT_GOAL_LIMIT,
) -> Verdict:
    tree, outcome = _head_tree(program, c, budget)
    start = Goal(tree.root.label, tree, outcome)
    queue: deque[tuple[Goal, int]] = deque([(start, 0)])
    seen = {variant_key(start.atom)}
    visited = 0
    while queue:
        goal, steps = queue.popleft()
        visited += 1
        v = _tree_check(goal.tree, goal.outcome)
        if not v:
            return v
        children = _successors(program, goal, budget)
        if not children:
            continue
        if steps >= step_limit or visited >= goal_limit:
            return Verdict(False, f"inconclusive: derivation from {c.head} still open after {steps} steps")
        for child in children:
            key = variant_key(child.atom)
            if key not in seen:
                seen.add(key)
                queue.append((child, steps + 1))
    return Verdict(True, "all derivation branches closed or guarded")


def _successors(program: Program, goal: Goal, budget: Budget) -> list[Goal]:
    # the first open leaf, in selection order, that admits a derivation step
    for path, node in selection_order(program, _open_leaves(goal.tree)):
        steps = [derive_step(program, goal, path, cl.index, budget) for cl in program.clauses_for(node.label)]
        steps = [g for g in steps if g is not None]
        if steps:
            return steps
    return []


def gc3_program(
    program: Program, budget: Budget = DEFAULT_BUDGET, step_limit: int = DEFAULT_STEP_LIMIT
) -> Verdict:
    for c in program.clauses:
        v = gc3_clause(program, c, budget, step_limit)
        if not v:
            return v
    return Verdict(True, "all derivation branches closed or guarded")


def check_program(
    program: Program, budget: Budget = DEFAULT_BUDGET, step_limit: int = DEFAULT_STEP_LIMIT
) -> GuardReport:
    """GC1 on every clause, then GC2, then GC3; a failing stage stops the analysis."""
    started = time.perf_counter()
    lines: list[str] = []
    failures: list[Failure] = []
    stages = (
        ("GC1", gc1_clause),
        ("GC2", lambda c: gc2_clause(program, c, budget)),
        ("GC3", lambda c: gc3_clause(program, c, budget, step_limit)),
    )
    for name, check in stages:
        for c in program.clauses:
            v = check(c)
            lines.append(f"GC{name[-1]} {c.head}: {'pass' if v else 'fail'} — {v.detail}")
            if not v:
                failures.append(Failure(name, f"clause {c.index}: {c.head}", v.detail, v.evidence))
        if failures:
            break
    elapsed = time.perf_counter() - started
    return GuardReport(UNGUARDED if failures else GUARDED, failures, elapsed, lines)
