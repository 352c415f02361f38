"""Reader for the Horn-clause subset accepted by the engine.

Grammar (EBNF, ``%`` starts a comment running to end of line)::

    program   = { directive | clause } ;
    directive = ":-" "coinductive" indicator { "," indicator } "." ;
    indicator = name "/" integer ;
    clause    = atom [ ":-" atom { "," atom } ] "." ;
    atom      = name [ "(" term { "," term } ")" ] ;
    term      = variable | integer | name [ "(" term { "," term } ")" ] | list ;
    list      = "[" "]" | "[" term { "," term } [ "|" term ] "]" ;

Names start with a lowercase letter, variables with an uppercase letter or
``_``; a lone ``_`` is a fresh variable at each occurrence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from .terms import Atom, Clause, Program, Struct, Term, Var, make_list


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class ParseError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(str(d) for d in diagnostics))


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<neck>:-)
  | (?P<int>[0-9]+)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<punct>[()\[\]|,./])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(src: str) -> Iterator[_Tok]:
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError([Diagnostic("error", line, pos - line_start + 1, f"unexpected character {src[pos]!r}")])
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            yield _Tok(kind if kind != "punct" else text, text, line, pos - line_start + 1)
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    yield _Tok("eof", "", line, pos - line_start + 1)


class _Reader:
    def __init__(self, src: str):
        self.toks = list(_tokenize(src))
        self.pos = 0
        self.anon = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.pos]

    def error(self, message: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError([Diagnostic("error", tok.line, tok.column, message)])

    def take(self, kind: str, what: str | None = None) -> _Tok:
        tok = self.tok
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise self.error(f"expected {what or repr(kind)}, found {found!r}")
        self.pos += 1
        return tok

    def accept(self, kind: str) -> bool:
        if self.tok.kind == kind:
            self.pos += 1
            return True
        return False

    def atom(self) -> Atom:
        name = self.take("name", "predicate name")
        return Atom(name.text, self.arguments())

    def arguments(self) -> tuple[Term, ...]:
        if not self.accept("("):
            return ()
        args = [self.term()]
        while self.accept(","):
            args.append(self.term())
        if self.tok.kind != ")":
            raise self.error(f"unbalanced parenthesis: expected ')', found {self.tok.text or 'end of input'!r}")
        self.pos += 1
        return tuple(args)

    def term(self) -> Term:
        tok = self.tok
        if tok.kind == "var":
            self.pos += 1
            if tok.text == "_":
                self.anon += 1
                return Var(f"_G{self.anon}")
            return Var(tok.text)
        if tok.kind == "int":
            self.pos += 1
            return Struct(tok.text)
        if tok.kind == "name":
            self.pos += 1
            return Struct(tok.text, self.arguments())
        if tok.kind == "[":
            return self.list_term()
        raise self.error(f"expected a term, found {tok.text or 'end of input'!r}")

    def list_term(self) -> Term:
        self.take("[")
        if self.accept("]"):
            return make_list([])
        items = [self.term()]
        while self.accept(","):
            items.append(self.term())
        tail = self.term() if self.accept("|") else None
        if self.tok.kind != "]":
            raise self.error(f"unbalanced bracket: expected ']', found {self.tok.text or 'end of input'!r}")
        self.pos += 1
        return make_list(items, tail)


def _decode(src: str | bytes) -> str:
    if isinstance(src, bytes):
        try:
            return src.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError([Diagnostic("error", 1, exc.start + 1, "input is not valid UTF-8")]) from None
    return src


def parse_program(src: str | bytes) -> Program:
    """Parse program text.  Raises ``ParseError`` carrying diagnostics."""
    r = _Reader(_decode(src))
    clauses: list[Clause] = []
    declared: dict[tuple[str, int], _Tok] = {}
    used_names: dict[str, set[int]] = {}
    warnings: list[Diagnostic] = []

    while r.tok.kind != "eof":
        if r.accept("neck"):
            name = r.take("name", "directive name")
            if name.text != "coinductive":
                raise r.error(f"unknown directive {name.text!r}", name)
            while True:
                ind = r.take("name", "predicate name")
                r.take("/", "'/'")
                arity = int(r.take("int", "arity").text)
                if ind.text in used_names:
                    raise r.error(f"directive for {ind.text}/{arity} follows its first use", ind)
                declared[(ind.text, arity)] = ind
                if not r.accept(","):
                    break
            r.take(".", "'.' ending the directive")
            continue
        head = r.atom()
        body: list[Atom] = []
        if r.accept("neck"):
            body.append(r.atom())
            while r.accept(","):
                body.append(r.atom())
        if r.tok.kind == "(" or r.tok.kind == ")":
            raise r.error("unbalanced parenthesis")
        r.take(".", "'.' ending the clause")
        r.anon = 0
        for a in (head, *body):
            used_names.setdefault(a.predicate, set()).add(a.arity)
        clauses.append(Clause(head, tuple(body), len(clauses) + 1))

    heads = {c.head.key for c in clauses}
    coinductive = set()
    for key, tok in declared.items():
        if key in heads:
            coinductive.add(key)
            continue
        name, arity = key
        if name in used_names:
            msg = f"coinductive {name}/{arity} does not match usage arity {sorted(used_names[name])}"
        else:
            msg = f"coinductive {name}/{arity} is never defined"
        warnings.append(Diagnostic("warning", tok.line, tok.column, msg))
    return Program(tuple(clauses), frozenset(coinductive), tuple(warnings))


def parse_query(src: str | bytes) -> Atom:
    """Parse a single atomic goal; a trailing ``.`` is optional."""
    r = _Reader(_decode(src))
    goal = r.atom()
    if r.tok.kind == ",":
        raise r.error("atomic goal required: conjunctions are not accepted")
    r.accept(".")
    if r.tok.kind != "eof":
        if r.tok.kind in ("(", ")"):
            raise r.error("unbalanced parenthesis")
        raise r.error(f"unexpected {r.tok.text!r} after goal")
    return goal


def parse_term(src: str) -> Term:
    r = _Reader(src)
    t = r.term()
    r.take("eof", "end of input")
    return t


def load_program(path) -> Program:
    with open(path, "rb") as fh:
        return parse_program(fh.read())
