"""Classical SLD resolution: leftmost selection, clauses in program order,
depth-first backtracking, occurs check on.  Used as the eager baseline and as
an answer oracle for inductive programs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import EMPTY, Atom, Program, Substitution, apply, compose, max_index, rename_apart, term_vars, unify

ANSWER = "answer"
DEPTH_EXCEEDED = "depth-exceeded"


@dataclass(frozen=True)
class SldGoal:
    atoms: tuple[Atom, ...]
    answer: Substitution = EMPTY

    @property
    def is_success(self) -> bool:
        return not self.atoms


@dataclass(frozen=True)
class SldEvent:
    kind: str  # ANSWER or DEPTH_EXCEEDED
    steps: int
    answer: Substitution | None = None


@dataclass
class SldResult:
    answers: list[Substitution] = field(default_factory=list)
    events: list[SldEvent] = field(default_factory=list)

    @property
    def depth_exceeded(self) -> int:
        return sum(1 for e in self.events if e.kind == DEPTH_EXCEEDED)

    def first_answer_steps(self) -> int | None:
        for e in self.events:
            if e.kind == ANSWER:
                return e.steps
        return None


def sld_solve(program: Program, goal: Atom, depth_limit: int = 30, max_solutions: int = 1) -> SldResult:
    """Answers for ``goal`` restricted to its variables, plus an ordered log of
    answers and of branches cut at ``depth_limit`` resolution steps."""
    result = SldResult()
    query_vars = term_vars(goal)
    fresh = max_index(goal) + 1
    # explicit stack of (goal, steps); children pushed in reverse to keep program order
    stack: list[tuple[SldGoal, int]] = [(SldGoal((goal,)), 0)]
    while stack:
        g, steps = stack.pop()
        if g.is_success:
            answer = g.answer
            result.answers.append(answer)
            result.events.append(SldEvent(ANSWER, steps, answer))
            if len(result.answers) >= max_solutions:
                break
            continue
        if steps >= depth_limit:
            result.events.append(SldEvent(DEPTH_EXCEEDED, steps))
            continue
        selected, rest = g.atoms[0], g.atoms[1:]
        children = []
        for clause in program.clauses_for(selected):
            renamed = rename_apart(clause, fresh)
            fresh += 1
            theta = unify(selected, renamed.head)
            if theta is None:
                continue
            atoms = tuple(apply(theta, a) for a in renamed.body + rest)
            children.append((SldGoal(atoms, compose(g.answer, theta).restrict(query_vars)), steps + 1))
        stack.extend(reversed(children))
    return result
