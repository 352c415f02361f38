"""Coinductive and-or trees built by term-matching clause heads.

An and-node carries an atom.  Expanding it attaches one or-node per program
clause whose renamed head term-matches the atom (program order); the or-node's
and-children are the clause body under that matcher.  Because only clause
variables are ever instantiated, expansion never relabels an existing node.

Nodes are addressed by paths: tuples of ``(clause_index, body_position)``
steps from the root.  Paths survive substitution, which may add or-children
but never removes them.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .terms import Atom, Program, Substitution, Var, apply, max_index, rename_apart, term_match, term_vars

FRONTIER = "frontier"
EXPANDED = "expanded"
DEAD_END = "dead-end"

COMPLETE = "complete"
BUDGET_EXCEEDED = "budget-exceeded"

Path = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class Budget:
    max_nodes: int = 1000
    max_depth: int = 100

    def __post_init__(self):
        if self.max_nodes <= 0 or self.max_depth <= 0:
            raise ValueError("budget limits must be positive")


DEFAULT_BUDGET = Budget()


@dataclass(eq=False)
class AndNode:
    label: Atom
    status: str = FRONTIER
    children: list[OrNode] = field(default_factory=list)
    # label changed by a substitution since the node was expanded
    stale: bool = False

    def or_child(self, clause_index: int) -> OrNode | None:
        for o in self.children:
            if o.clause_index == clause_index:
                return o
        return None


@dataclass(eq=False)
class OrNode:
    clause_index: int
    head: Atom
    matcher: Substitution
    children: list[AndNode]

    @property
    def is_box(self) -> bool:
        return not self.children


@dataclass(eq=False)
class CoTree:
    root: AndNode
    fresh: int  # next unused rename index

    def substitute(self, s: Substitution) -> CoTree:
        return CoTree(_map_node(self.root, s), self.fresh)

    def copy(self) -> CoTree:
        return CoTree(_map_node(self.root, Substitution()), self.fresh)

    def walk(self) -> Iterator[tuple[Path, AndNode, int]]:
        """And-nodes in pre-order (leftmost-outermost first) with path and depth."""
        stack: list[tuple[Path, AndNode, int]] = [((), self.root, 0)]
        while stack:
            path, node, depth = stack.pop()
            yield path, node, depth
            pending = []
            for o in node.children:
                for i, c in enumerate(o.children):
                    pending.append((path + ((o.clause_index, i),), c, depth + 1))
            stack.extend(reversed(pending))

    def bfs(self) -> Iterator[tuple[Path, AndNode, int]]:
        queue: deque[tuple[Path, AndNode, int]] = deque([((), self.root, 0)])
        while queue:
            path, node, depth = queue.popleft()
            yield path, node, depth
            for o in node.children:
                for i, c in enumerate(o.children):
                    queue.append((path + ((o.clause_index, i),), c, depth + 1))

    def node(self, path: Path) -> AndNode:
        node = self.root
        for clause_index, pos in path:
            o = node.or_child(clause_index)
            if o is None:
                raise KeyError(path)
            node = o.children[pos]
        return node

    def size(self) -> int:
        return sum(1 + len(n.children) for _, n, _ in self.walk())

    def depth(self) -> int:
        return max(d for _, _, d in self.walk())

    def frontier(self) -> list[Path]:
        return [p for p, n, _ in self.bfs() if n.status == FRONTIER]

    def variables(self) -> set[Var]:
        out: set[Var] = set()
        for _, n, _ in self.walk():
            out.update(term_vars(n.label))
        return out


def _map_node(node: AndNode, s: Substitution) -> AndNode:
    label = apply(s, node.label)
    ors = []
    for o in node.children:
        matcher = Substitution({v: apply(s, t) for v, t in o.matcher.items()}) if s else o.matcher
        ors.append(OrNode(o.clause_index, o.head, matcher, [_map_node(c, s) for c in o.children]))
    stale = node.stale or (node.status != FRONTIER and label != node.label)
    return AndNode(label, node.status, ors, stale)


def new_cotree(goal: Atom) -> CoTree:
    return CoTree(AndNode(goal), max_index(goal) + 1)


def _match(program: Program, label: Atom, clause_index: int, fresh: int) -> OrNode | None:
    renamed = rename_apart(program.clause(clause_index), fresh)
    theta = term_match(label, renamed.head)
    if theta is None:
        return None
    return OrNode(clause_index, renamed.head, theta, [AndNode(apply(theta, b)) for b in renamed.body])


def _grow(program: Program, tree: CoTree, node: AndNode) -> list[OrNode]:
    """Or-children for clauses that match ``node`` but are not attached yet.

    Consumes one rename index per attached clause.
    """
    present = {o.clause_index for o in node.children}
    new = []
    for clause in program.clauses_for(node.label):
        if clause.index in present:
            continue
        o = _match(program, node.label, clause.index, tree.fresh)
        if o is not None:
            tree.fresh += 1
            new.append(o)
    return new


def _attach(node: AndNode, new: list[OrNode]) -> None:
    if new:
        node.children = sorted(node.children + new, key=lambda o: o.clause_index)
    node.status = EXPANDED if node.children else DEAD_END
    node.stale = False


def expand_node(program: Program, tree: CoTree, path: Path) -> CoTree:
    """Expand the frontier node at ``path``; returns a new tree."""
    out = tree.copy()
    node = out.node(path)
    if node.status != FRONTIER:
        raise ValueError(f"node at {path} is not a frontier node")
    _attach(node, _grow(program, out, node))
    return out


def expand_to_budget(
    program: Program,
    tree: CoTree,
    budget: Budget = DEFAULT_BUDGET,
    rng: random.Random | None = None,
) -> tuple[CoTree, str]:
    """Expand every frontier node, breadth-first and leftmost-first.

    Nodes whose label was changed by a substitution are re-examined for
    clauses that now match.  Stops before the first expansion that would push
    the tree past ``budget``; the outcome is then ``BUDGET_EXCEEDED``.  With
    ``rng`` the pending nodes are processed in random order instead (used to
    check that the result does not depend on scheduling).
    """
    out = tree.copy()
    count = out.size()
    if count > budget.max_nodes:
        return out, BUDGET_EXCEEDED
    pending = [(n, d) for _, n, d in out.bfs() if n.status == FRONTIER or n.stale]
    queue = deque(pending)
    while queue:
        if rng is None:
            node, depth = queue.popleft()
        else:
            i = rng.randrange(len(queue))
            queue.rotate(-i)
            node, depth = queue.popleft()
        fresh = out.fresh
        new = _grow(program, out, node)
        added = sum(1 + len(o.children) for o in new)
        deepest = depth + 1 if any(o.children for o in new) else depth
        if count + added > budget.max_nodes or deepest > budget.max_depth:
            out.fresh = fresh
            return out, BUDGET_EXCEEDED
        _attach(node, new)
        count += added
        for o in new:
            queue.extend((c, depth + 1) for c in o.children)
    return out, COMPLETE


def build_cotree(program: Program, goal: Atom, budget: Budget = DEFAULT_BUDGET) -> tuple[CoTree, str]:
    return expand_to_budget(program, new_cotree(goal), budget)


@dataclass(frozen=True)
class SuccessReport:
    """One or-child choice per selected and-node; every selected branch ends in a box."""

    choices: dict[Path, int]
    # and-nodes accepted without a closing clause (open coinductive leaves)
    accepted: tuple[Path, ...] = ()


def find_success_subtree(
    tree: CoTree, accept: Callable[[AndNode], bool] | None = None
) -> SuccessReport | None:
    """First success subtree in clause order, or ``None``.

    ``accept`` may declare some unclosed and-nodes satisfied; by default only
    boxes close a branch.
    """
    choices: dict[Path, int] = {}
    accepted: list[Path] = []

    def closes(path: Path, node: AndNode) -> bool:
        if node.status == FRONTIER:
            return False
        for o in node.children:
            mark_c, mark_a = len(choices), len(accepted)
            if all(closes(path + ((o.clause_index, i),), c) for i, c in enumerate(o.children)):
                choices[path] = o.clause_index
                return True
            # roll back partial selections from a failed alternative
            for k in list(choices)[mark_c:]:
                del choices[k]
            del accepted[mark_a:]
        if accept is not None and accept(node):
            accepted.append(path)
            return True
        return False

    if closes((), tree.root):
        return SuccessReport(dict(choices), tuple(accepted))
    return None


# rendering

BOX = "[]box"


def render_text(tree: CoTree) -> str:
    lines: list[str] = []

    def emit(node: AndNode, indent: int) -> None:
        note = "" if node.status == EXPANDED else f"  ({node.status})"
        lines.append("  " * indent + str(node.label) + note)
        for o in node.children:
            lines.append("  " * (indent + 1) + f"• {o.clause_index}")
            if o.is_box:
                lines.append("  " * (indent + 2) + BOX)
            for c in o.children:
                emit(c, indent + 2)

    emit(tree.root, 0)
    return "\n".join(lines) + "\n"


def render_dot(tree: CoTree, name: str = "cotree") -> str:
    lines = [f"digraph {name} {{"]
    counter = 0

    def new_id() -> str:
        nonlocal counter
        counter += 1
        return f"n{counter}"

    def quote(s: str) -> str:
        return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'

    def emit(node: AndNode) -> str:
        nid = new_id()
        style = "" if node.status == EXPANDED else ", style=dashed"
        lines.append(f"  {nid} [shape=ellipse, label={quote(str(node.label))}{style}];")
        for o in node.children:
            oid = new_id()
            lines.append(f"  {oid} [shape=point, xlabel={quote(str(o.clause_index))}];")
            lines.append(f"  {nid} -> {oid};")
            if o.is_box:
                bid = new_id()
                lines.append(f'  {bid} [shape=box, label="□"];')
                lines.append(f"  {oid} -> {bid};")
            for c in o.children:
                lines.append(f"  {oid} -> {emit(c)};")
        return nid

    emit(tree.root)
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_signature(tree: CoTree) -> str:
    """Text rendering with variables renamed canonically (first occurrence, pre-order).

    Equal signatures mean the trees are isomorphic up to variable renaming.
    """
    order: dict[Var, None] = {}
    for _, n, _ in tree.walk():
        for v in term_vars(n.label):
            order.setdefault(v, None)
    rename = Substitution({v: Var("V", -i) for i, v in enumerate(order, start=1)})
    return render_text(CoTree(_map_node(tree.root, rename), tree.fresh))


__all__ = [
    "AndNode", "OrNode", "CoTree", "Budget", "DEFAULT_BUDGET", "SuccessReport",
    "FRONTIER", "EXPANDED", "DEAD_END", "COMPLETE", "BUDGET_EXCEEDED",
    "new_cotree", "expand_node", "expand_to_budget", "build_cotree",
    "find_success_subtree", "render_text", "render_dot", "tree_signature",
]
