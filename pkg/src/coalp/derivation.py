"""Coinductive derivations: rewriting whole goal trees by external mgus.

A derivation step picks an and-node of the current tree and a clause whose
renamed head unifies with it by an mgu that binds at least one tree variable,
applies that mgu to the whole tree and re-expands it.  Unifiers that only bind
clause variables are term-matches, which the tree already contains.

Search is organised around the success subtree being built: every required
and-node (reachable from the root through chosen or-children) gets a clause.
Choosing a clause that already term-matches costs no step; any other
unifiable clause costs one derivation step.  Inductive nodes are served first,
then leftmost-outermost, then by clause order.  Answers are enumerated by
iterative deepening over the number of steps, which keeps the answer set
independent of clause and body-atom order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .cotree import (
    BUDGET_EXCEEDED,
    COMPLETE,
    DEFAULT_BUDGET,
    FRONTIER,
    AndNode,
    Budget,
    CoTree,
    Path,
    SuccessReport,
    expand_to_budget,
    find_success_subtree,
    new_cotree,
)
from .terms import EMPTY, Atom, Program, Substitution, apply, compose, rename_apart, term_vars, unify, variant_key

SUCCESS = "success"
EXHAUSTED = "exhausted"
OBSERVATION_LIMIT = "observation-limit"
STATUSES = (SUCCESS, EXHAUSTED, BUDGET_EXCEEDED, OBSERVATION_LIMIT)


@dataclass(frozen=True)
class Resolvent:
    node: Atom
    clause_index: int
    mgu: Substitution
    path: Path = ()

    def __str__(self) -> str:
        return f"node={self.node} clause={self.clause_index} mgu={self.mgu}"


@dataclass(frozen=True)
class Goal:
    atom: Atom
    tree: CoTree
    outcome: str = COMPLETE
    resolvent: Resolvent | None = None

    @cached_property
    def variables(self):
        return frozenset(self.tree.variables())

    @property
    def exceeded(self) -> bool:
        return self.outcome == BUDGET_EXCEEDED


@dataclass(frozen=True)
class RunConfig:
    budget: Budget = DEFAULT_BUDGET
    observe_depth: int = 10
    max_solutions: int = 1
    strategy: str = "inductive-priority"
    # step cap for queries on inductive predicates; None means budget.max_depth
    max_steps: int | None = None

    def __post_init__(self):
        if self.observe_depth < 1:
            raise ValueError("observe_depth must be at least 1")
        if self.max_solutions < 1:
            raise ValueError("max_solutions must be at least 1")
        if self.strategy != "inductive-priority":
            raise ValueError(f"unknown strategy {self.strategy!r}")


@dataclass
class DerivationTrace:
    goals: list[Goal]
    resolvents: list[Resolvent]
    answer: Substitution
    status: str
    success: SuccessReport | None = None

    @property
    def query(self) -> Atom:
        return self.goals[0].atom

    def answer_text(self) -> str:
        parts = [f"{v} = {self.answer[v]}" for v in term_vars(self.query) if v in self.answer]
        return ", ".join(parts) if parts else "true"

    def render(self) -> str:
        lines = [f"step {i}: {r}" for i, r in enumerate(self.resolvents, start=1)]
        lines.append(f"status={self.status} answer={self.answer}")
        return "\n".join(lines) + "\n"


def make_goal(program: Program, atom: Atom, budget: Budget = DEFAULT_BUDGET) -> Goal:
    tree, outcome = expand_to_budget(program, new_cotree(atom), budget)
    return Goal(atom, tree, outcome)


def _mgu(program: Program, goal: Goal, node: AndNode, clause_index: int) -> Substitution | None:
    """Unifier of ``node`` with the renamed clause head, restricted to tree variables."""
    renamed = rename_apart(program.clause(clause_index), goal.tree.fresh)
    theta = unify(node.label, renamed.head)
    if theta is None:
        return None
    return theta.restrict(goal.variables)


def _step(program: Program, goal: Goal, path: Path, node: AndNode, clause_index: int,
          theta: Substitution, budget: Budget) -> Goal:
    tree = goal.tree.substitute(theta)
    tree.fresh += 1  # the rename index spent on the clause
    tree, outcome = expand_to_budget(program, tree, budget)
    return Goal(apply(theta, goal.atom), tree, outcome, Resolvent(node.label, clause_index, theta, path))


def derive_step(program: Program, goal: Goal, target: Path, clause_index: int,
                budget: Budget = DEFAULT_BUDGET) -> Goal | None:
    """One coinductive derivation step, or ``None`` when the clause does not
    unify with the target node by a non-empty mgu."""
    node = goal.tree.node(target)
    theta = _mgu(program, goal, node, clause_index)
    if not theta:
        return None
    return _step(program, goal, target, node, clause_index, theta, budget)


def selection_order(program: Program, nodes: list[tuple[Path, AndNode]]) -> list[tuple[Path, AndNode]]:
    # stable sort keeps pre-order inside each class
    return sorted(nodes, key=lambda pn: program.is_coinductive(pn[1].label))


def select_resolvent(program: Program, goal: Goal) -> tuple[Path, int] | None:
    """First (node, clause) pair admitting a non-empty mgu.

    Inductive nodes before coinductive ones, then leftmost-outermost, then the
    lowest clause index.
    """
    for path, node in selection_order(program, [(p, n) for p, n, _ in goal.tree.walk()]):
        for clause in program.clauses_for(node.label):
            if _mgu(program, goal, node, clause.index):
                return path, clause.index
    return None


# search


@dataclass(eq=False)
class _State:
    goal: Goal
    commits: dict[Path, int]
    goals: tuple[Goal, ...]
    answer: Substitution
    children: list[_State | _PendingStep] | None = None
    # successful closure or selected node with no usable clause
    terminal: str | None = None

    @property
    def steps(self) -> int:
        return len(self.goals) - 1

    def trace(self, status: str, success: SuccessReport | None = None) -> DerivationTrace:
        resolvents = [g.resolvent for g in self.goals[1:]]
        return DerivationTrace(list(self.goals), resolvents, self.answer.restrict(term_vars(self.goals[0].atom)),
                               status, success)


class _Search:
    def __init__(self, program: Program, atom: Atom, cfg: RunConfig):
        self.program = program
        self.cfg = cfg
        self.coinductive_root = program.is_coinductive(atom)
        root = make_goal(program, atom, cfg.budget)
        self.root = _State(root, {}, (root,), EMPTY)

    def _open(self, state: _State) -> list[tuple[Path, AndNode]]:
        """Required and-nodes of the prospective success subtree still lacking a clause."""
        tree = state.goal.tree
        goal_vars = set(term_vars(state.goal.atom))
        out = []
        stack: list[tuple[Path, AndNode]] = [((), tree.root)]
        while stack:
            path, node = stack.pop()
            chosen = state.commits.get(path)
            if chosen is None:
                if not self._accepts(node, goal_vars):
                    out.append((path, node))
                continue
            o = node.or_child(chosen)
            stack.extend(reversed([(path + ((chosen, i),), c) for i, c in enumerate(o.children)]))
        return out

    def _accepts(self, node: AndNode, goal_vars: set) -> bool:
        # Under an inductive query, a coinductive obligation that no longer
        # mentions the query's variables is left to lazy evaluation.
        return (
            not self.coinductive_root
            and node.status != FRONTIER
            and self.program.is_coinductive(node.label)
            and goal_vars.isdisjoint(term_vars(node.label))
        )

    def _expand(self, state: _State) -> None:
        opened = self._open(state)
        state.children = []
        if not opened:
            state.terminal = SUCCESS
            return
        path, node = selection_order(self.program, opened)[0]
        goal = state.goal
        for clause in self.program.clauses_for(node.label):
            theta = _mgu(self.program, goal, node, clause.index)
            if theta is None:
                continue
            commits = dict(state.commits)
            commits[path] = clause.index
            if not theta:
                if node.or_child(clause.index) is None:
                    raise AssertionError(f"clause {clause.index} term-matches {node.label} but is not in the tree")
                state.children.append(_State(goal, commits, state.goals, state.answer))
            else:
                state.children.append(_PendingStep(self, state, path, node, clause.index, theta, commits))
        if not state.children:
            state.terminal = EXHAUSTED

    def run(self) -> Enumeration:
        cfg = self.cfg
        if self.coinductive_root:
            cap = cfg.observe_depth
        else:
            cap = cfg.max_steps if cfg.max_steps is not None else cfg.budget.max_depth
        solutions: list[DerivationTrace] = []
        seen: set[str] = set()
        stopped: DerivationTrace | None = None
        dead: DerivationTrace | None = None

        # Coinductive queries are observed lazily: one depth-first pass that
        # stops at the first branch reaching the observation depth.  Inductive
        # queries deepen the step bound round by round.
        lazy = self.coinductive_root
        for bound in [cap] if lazy else range(cap + 1):
            cut_at: _State | None = None
            dead = None
            stack: list = [self.root]
            while stack:
                item = stack.pop()
                state = item.force() if isinstance(item, _PendingStep) else item
                if state.goal.exceeded:
                    return Enumeration(solutions, state.trace(BUDGET_EXCEEDED), BUDGET_EXCEEDED)
                if state.children is None:
                    self._expand(state)
                if state.terminal == SUCCESS:
                    if lazy or state.steps == bound:
                        report = self._success_report(state)
                        key = variant_key(apply(state.answer, self.root.goal.atom))
                        if key not in seen:
                            seen.add(key)
                            solutions.append(state.trace(SUCCESS, report))
                            if len(solutions) >= cfg.max_solutions:
                                return Enumeration(solutions, None, SUCCESS)
                    continue
                if state.terminal == EXHAUSTED:
                    if dead is None:
                        dead = state.trace(EXHAUSTED)
                    continue
                for child in reversed(state.children):
                    if isinstance(child, _PendingStep) and state.steps >= bound:
                        if lazy:
                            trace = state.trace(OBSERVATION_LIMIT)
                            return Enumeration(solutions, trace, SUCCESS if solutions else OBSERVATION_LIMIT)
                        if cut_at is None:
                            cut_at = state
                        continue
                    stack.append(child)
            if cut_at is None:
                status = SUCCESS if solutions else EXHAUSTED
                return Enumeration(solutions, None if solutions else (dead or self.root.trace(EXHAUSTED)), status)
            stopped = cut_at.trace(BUDGET_EXCEEDED)

        status = SUCCESS if solutions else stopped.status
        return Enumeration(solutions, stopped, status)

    def _success_report(self, state: _State) -> SuccessReport:
        goal_vars = set(term_vars(state.goal.atom))
        report = find_success_subtree(state.goal.tree, lambda n: self._accepts(n, goal_vars))
        return report if report is not None else SuccessReport(dict(state.commits))


class _PendingStep:
    """A derivation step whose tree is only built when the search reaches it."""

    __slots__ = ("search", "parent", "path", "node", "clause_index", "theta", "commits", "_state")

    def __init__(self, search, parent, path, node, clause_index, theta, commits):
        self.search = search
        self.parent = parent
        self.path = path
        self.node = node
        self.clause_index = clause_index
        self.theta = theta
        self.commits = commits
        self._state = None

    def force(self) -> _State:
        if self._state is None:
            p = self.parent
            goal = _step(self.search.program, p.goal, self.path, self.node, self.clause_index,
                         self.theta, self.search.cfg.budget)
            self._state = _State(goal, self.commits, p.goals + (goal,), compose(p.answer, self.theta))
        return self._state


@dataclass
class Enumeration:
    """Outcome of a search: success traces plus the trace that ended the search."""

    solutions: list[DerivationTrace]
    stopped: DerivationTrace | None
    status: str

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self) -> int:
        return len(self.solutions)

    def __getitem__(self, i):
        return self.solutions[i]

    @property
    def traces(self) -> list[DerivationTrace]:
        return self.solutions + ([self.stopped] if self.stopped is not None else [])


def enumerate_solutions(program: Program, goal: Atom, cfg: RunConfig = RunConfig()) -> Enumeration:
    """Up to ``cfg.max_solutions`` distinct answers, shortest derivations first."""
    return _Search(program, goal, cfg).run()


def run_query(program: Program, goal: Atom, cfg: RunConfig = RunConfig()) -> DerivationTrace:
    """The first successful derivation, or the trace explaining why there is none.

    Queries on coinductive predicates that never close stop after
    ``cfg.observe_depth`` steps with status ``observation-limit``, reporting the
    partial answer built so far.
    """
    result = enumerate_solutions(program, goal, RunConfig(cfg.budget, cfg.observe_depth, 1, cfg.strategy, cfg.max_steps))
    return result.solutions[0] if result.solutions else result.stopped
