"""Command-line entry point: ``coalp check|run|dump|corpus``."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .cotree import BUDGET_EXCEEDED, Budget, build_cotree, render_dot, render_text
from .derivation import EXHAUSTED, OBSERVATION_LIMIT, SUCCESS, RunConfig, enumerate_solutions
from .guardedness import check_program
from .parser import ParseError, load_program, parse_query
from .sld import sld_solve
from .terms import term_vars

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNGUARDED = 2  # check verdict, and run refusing an unguarded program
EXIT_BUDGET = 3
EXIT_NO_ANSWER = 4
EXIT_MISMATCH = 5

RUN_EXIT = {SUCCESS: EXIT_OK, BUDGET_EXCEEDED: EXIT_BUDGET, EXHAUSTED: EXIT_NO_ANSWER, OBSERVATION_LIMIT: EXIT_NO_ANSWER}


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coalp", description="Lazy corecursive logic programming with guardedness checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--max-nodes", type=_positive, default=1000, help="tree node budget (default 1000)")
    budget.add_argument("--max-depth", type=_positive, default=100, help="tree depth budget (default 100)")

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--observe-depth", type=_positive, default=10,
                        help="derivation steps allotted to coinductive queries (default 10)")
    search.add_argument("--max-solutions", type=_positive, default=1)

    p = sub.add_parser("check", parents=[budget], help="run the guardedness checks")
    p.add_argument("program")

    p = sub.add_parser("run", parents=[budget, search], help="run a query")
    p.add_argument("program")
    p.add_argument("query")
    p.add_argument("--engine", choices=("coalp", "sld"), default="coalp")
    p.add_argument("--force", action="store_true", help="run even if the program is unguarded")

    p = sub.add_parser("dump", parents=[budget], help="print the coinductive tree of a query")
    p.add_argument("program")
    p.add_argument("query")
    p.add_argument("--format", choices=("text", "dot"), default="text")

    p = sub.add_parser("corpus", parents=[budget, search], help="replay a directory of annotated programs")
    p.add_argument("directory", nargs="?", help="defaults to the bundled corpus")
    return ap


def _budget(args) -> Budget:
    return Budget(args.max_nodes, args.max_depth)


def _config(args) -> RunConfig:
    return RunConfig(_budget(args), args.observe_depth, args.max_solutions)


def _load(path: str, err):
    try:
        program = load_program(path)
    except OSError as exc:
        print(f"{path}: {exc.strerror or exc}", file=err)
        return None
    except ParseError as exc:
        for d in exc.diagnostics:
            print(f"{path}:{d}", file=err)
        return None
    for d in program.warnings:
        print(f"{path}:{d}", file=err)
    return program


def _query(text: str, err):
    try:
        return parse_query(text)
    except ParseError as exc:
        for d in exc.diagnostics:
            print(f"query:{d}", file=err)
        return None


def cmd_check(args, out, err) -> int:
    program = _load(args.program, err)
    if program is None:
        return EXIT_ERROR
    report = check_program(program, _budget(args))
    out.write(report.render())
    return EXIT_OK if report.guarded else EXIT_UNGUARDED


def _run_sld(program, goal, args, out) -> str:
    result = sld_solve(program, goal, args.max_depth, args.max_solutions)
    names = term_vars(goal)
    for answer in result.answers:
        parts = [f"{v} = {answer[v]}" for v in names if v in answer]
        out.write((", ".join(parts) if parts else "true") + "\n")
    if result.answers:
        status = SUCCESS
    elif result.depth_exceeded:
        status = BUDGET_EXCEEDED
    else:
        status = EXHAUSTED
    out.write(f"status={status} depth-exceeded-branches={result.depth_exceeded}\n")
    return status


def _run_coalp(program, goal, cfg, out) -> str:
    result = enumerate_solutions(program, goal, cfg)
    for trace in result.solutions:
        out.write(trace.render())
        out.write(trace.answer_text() + "\n")
    if not result.solutions and result.stopped is not None:
        out.write(result.stopped.render())
        if result.status == OBSERVATION_LIMIT:
            out.write(f"partial: {result.stopped.answer_text()}\n")
    return result.status


def cmd_run(args, out, err) -> int:
    program = _load(args.program, err)
    if program is None:
        return EXIT_ERROR
    goal = _query(args.query, err)
    if goal is None:
        return EXIT_ERROR
    if args.engine == "sld":
        return RUN_EXIT[_run_sld(program, goal, args, out)]
    if not args.force:
        report = check_program(program, _budget(args))
        if not report.guarded:
            err.write(report.render())
            print("refusing to run an unguarded program (use --force)", file=err)
            return EXIT_UNGUARDED
    return RUN_EXIT[_run_coalp(program, goal, _config(args), out)]


def cmd_dump(args, out, err) -> int:
    program = _load(args.program, err)
    if program is None:
        return EXIT_ERROR
    goal = _query(args.query, err)
    if goal is None:
        return EXIT_ERROR
    tree, outcome = build_cotree(program, goal, _budget(args))
    out.write(render_dot(tree) if args.format == "dot" else render_text(tree))
    if outcome == BUDGET_EXCEEDED:
        print("note: tree truncated at the budget", file=err)
    return EXIT_OK


# corpus


@dataclass
class CorpusRow:
    name: str
    verdict: str
    elapsed: float
    status: str
    expected: tuple[str, str] | None
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.expected == (self.verdict, self.status)


def read_header(text: str) -> tuple[tuple[str, str] | None, str | None]:
    """``% expect: <verdict>, <status>`` and ``% query: <atom>`` header lines."""
    expected = query = None
    for line in text.splitlines():
        line = line.strip()
        if not line.startswith("%"):
            continue
        body = line.lstrip("%").strip()
        if body.startswith("expect:"):
            parts = [p.strip() for p in body[len("expect:"):].split(",")]
            if len(parts) == 2:
                expected = (parts[0], parts[1])
        elif body.startswith("query:"):
            query = body[len("query:"):].strip()
    return expected, query


def _corpus_entry(path: Path, args) -> CorpusRow:
    text = path.read_text(encoding="utf-8")
    expected, query = read_header(text)
    row = CorpusRow(path.name, "error", 0.0, "error", expected)
    try:
        program = load_program(path)
        goal = parse_query(query) if query else None
    except ParseError as exc:
        row.note = str(exc)
        return row
    report = check_program(program, _budget(args))
    row.verdict, row.elapsed = report.verdict, report.elapsed
    if goal is None:
        row.status, row.note = "-", "no query header"
    else:
        row.status = enumerate_solutions(program, goal, _config(args)).status
    if expected is None:
        row.note = row.note or "no expect header"
    elif not row.ok:
        row.note = f"expected {expected[0]}, {expected[1]}"
    return row


def _corpus_dir(args) -> Path:
    if args.directory:
        return Path(args.directory)
    return Path(str(resources.files("coalp") / "corpus"))


def cmd_corpus(args, out, err) -> int:
    directory = _corpus_dir(args)
    files = sorted(directory.glob("*.lp")) if directory.is_dir() else []
    if not files:
        print(f"{directory}: no .lp programs found", file=err)
        return EXIT_ERROR
    with ThreadPoolExecutor() as pool:
        rows = list(pool.map(lambda f: _corpus_entry(f, args), files))
    width = max(len(r.name) for r in rows)
    out.write(f"{'program':<{width}}  {'gc verdict':<10}  {'gc time':>8}  {'run status':<17}  check\n")
    for r in rows:
        mark = "ok" if r.ok else "MISMATCH"
        line = f"{r.name:<{width}}  {r.verdict:<10}  {r.elapsed:>7.3f}s  {r.status:<17}  {mark}"
        out.write(line + (f"  ({r.note})" if r.note else "") + "\n")
    bad = [r for r in rows if not r.ok]
    for r in bad:
        print(f"mismatch: {r.name}: got {r.verdict}, {r.status}; {r.note}", file=err)
    return EXIT_MISMATCH if bad else EXIT_OK


COMMANDS = {"check": cmd_check, "run": cmd_run, "dump": cmd_dump, "corpus": cmd_corpus}


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    return COMMANDS[args.command](args, out, err)


if __name__ == "__main__":
    sys.exit(main())
