"""Shared builders for the test suite."""

from __future__ import annotations

from pathlib import Path

from coalp.parser import load_program, parse_program, parse_query, parse_term
from coalp.terms import Substitution, Var

CORPUS = Path(__file__).resolve().parents[1] / "src" / "coalp" / "corpus"


def _corpus_queries():
    from coalp.cli import read_header

    out = []
    for path in sorted(CORPUS.glob("*.lp")):
        _, query = read_header(path.read_text(encoding="utf-8"))
        out.append((path.stem, query))
    return out


# (program stem, documented query) for every corpus file
CORPUS_QUERIES = _corpus_queries()


def corpus(name: str):
    return load_program(CORPUS / f"{name}.lp")


def atom(text: str):
    return parse_query(text)


def term(text: str):
    return parse_term(text)


def subst(**bindings: str) -> Substitution:
    """``subst(X="f(Y)")`` with source variables; ``X_3`` style keys give rename indices."""
    out = {}
    for key, value in bindings.items():
        name, _, index = key.partition("_")
        out[Var(name, int(index) if index else 0)] = term(value)
    return Substitution(out)


def canonical(s: Substitution, order) -> str:
    """Rendering of ``s`` over ``order`` with range variables renamed by first occurrence."""
    from coalp.terms import Struct, apply, term_vars

    keys = [v for v in order if v in s]
    values = [s[v] for v in keys]
    fresh = {}
    for v in term_vars(Struct("t", tuple(values))):
        fresh.setdefault(v, Var(f"V{len(fresh) + 1}"))
    renamed = Substitution(fresh)
    return ", ".join(f"{v}={apply(renamed, t)}" for v, t in zip(keys, values))


__all__ = ["CORPUS", "CORPUS_QUERIES", "corpus", "atom", "term", "subst", "canonical", "parse_program"]
