"""A lazy corecursive logic-programming engine with static guardedness checks."""

from .cotree import Budget, CoTree, build_cotree, expand_node, expand_to_budget, find_success_subtree, new_cotree
from .derivation import DerivationTrace, Goal, RunConfig, derive_step, enumerate_solutions, run_query, select_resolvent
from .guardedness import GuardReport, check_program, gc1_clause, gc1_pair, gc2_program, gc3_program
from .parser import Diagnostic, ParseError, load_program, parse_program, parse_query
from .sld import SldResult, sld_solve
from .terms import Atom, Clause, Program, Struct, Substitution, Var, apply, compose, rename_apart, term_match, unify

__all__ = [
    "Atom", "Budget", "Clause", "CoTree", "DerivationTrace", "Diagnostic", "Goal", "GuardReport",
    "ParseError", "Program", "RunConfig", "SldResult", "Struct", "Substitution", "Var",
    "apply", "build_cotree", "check_program", "compose", "derive_step", "enumerate_solutions",
    "expand_node", "expand_to_budget", "find_success_subtree", "gc1_clause", "gc1_pair",
    "gc2_program", "gc3_program", "load_program", "new_cotree", "parse_program", "parse_query",
    "rename_apart", "run_query", "select_resolvent", "sld_solve", "term_match", "unify",
]
