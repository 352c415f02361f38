import io
import shutil
import subprocess
import sys

import pydot
import pytest

from coalp.cli import main, read_header

from helpers import CORPUS, CORPUS_QUERIES


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def lp(name):
    return str(CORPUS / f"{name}.lp")


def test_check_guarded_and_unguarded():
    code, out, _ = run("check", lp("gcomember"))
    assert code == 0 and "verdict: guarded" in out
    code, out, _ = run("check", lp("comember"))
    assert code == 2 and "verdict: unguarded" in out
    assert "GC1 comember(X,S): fail" in out


def test_check_missing_file():
    code, out, err = run("check", "nosuchfile.lp")
    assert code == 1 and out == "" and "nosuchfile.lp" in err


def test_check_parse_error(tmp_path):
    bad = tmp_path / "bad.lp"
    bad.write_text("p(X :- q.\n")
    code, _, err = run("check", str(bad))
    assert code == 1 and "unbalanced parenthesis" in err and ":1:5:" in err


def test_run_takefirstn():
    code, out, _ = run("run", lp("takefirstn"), "taken(s(s(0)),X)")
    assert code == 0
    assert out.splitlines()[-1] == "X = [0, s(0)]"


def test_run_refuses_unguarded_without_force():
    code, out, err = run("run", lp("badstream"), "badstream(X)")
    assert code == 2 and out == "" and "--force" in err


def test_run_forced_badstream():
    code, out, _ = run("run", lp("badstream"), "badstream(X)", "--force")
    assert code == 3 and "status=budget-exceeded" in out


def test_run_bitstream_partial_answer():
    code, out, _ = run("run", lp("bitstream"), "stream(X)", "--observe-depth", "3")
    assert code == 4
    assert "partial: X = [0|[X_5|Y_5]]" in out


def test_run_exhausted(tmp_path):
    prog = tmp_path / "p.lp"
    prog.write_text("p(a).\n")
    code, out, _ = run("run", str(prog), "p(b)")
    assert code == 4 and "status=exhausted" in out


def test_run_several_solutions():
    code, out, _ = run("run", lp("bitlist"), "bitlist(X)", "--max-solutions", "3")
    assert code == 0
    assert [l for l in out.splitlines() if l.startswith("X = ")] == ["X = []", "X = [0]", "X = [1]"]


def test_run_sld_engine():
    code, out, _ = run("run", lp("bitlist"), "bit(X)", "--engine", "sld", "--max-solutions", "2")
    assert code == 0 and out.splitlines()[:2] == ["X = 0", "X = 1"]
    code, out, _ = run("run", lp("bitstream"), "stream(X)", "--engine", "sld", "--max-depth", "8")
    assert code == 3 and "depth-exceeded-branches=" in out


def test_run_bad_query():
    code, _, err = run("run", lp("bitlist"), "p(X), q(X)")
    assert code == 1 and "atomic goal required" in err


def test_budget_flags_validated():
    with pytest.raises(SystemExit):
        run("check", lp("bitlist"), "--max-nodes", "0")


def test_dump_text():
    code, out, _ = run("dump", lp("bitlist"), "bitlist([0])")
    assert code == 0 and "[]box" in out and "• 4" in out


def test_dump_truncated_note():
    code, _, err = run("dump", lp("gc"), "connected(0,Z)", "--max-nodes", "30")
    assert code == 0 and "truncated" in err


@pytest.mark.parametrize("name, query", CORPUS_QUERIES, ids=[n for n, _ in CORPUS_QUERIES])
def test_dump_dot_is_valid(name, query):
    code, out, _ = run("dump", lp(name), query, "--format", "dot", "--max-nodes", "200")
    assert code == 0
    (graph,) = pydot.graph_from_dot_data(out)
    assert graph.get_type() == "digraph"
    assert graph.get_nodes()


def test_corpus_all_expectations_met():
    code, out, err = run("corpus", str(CORPUS))
    assert code == 0, err
    lines = out.splitlines()
    assert lines[0].split()[:3] == ["program", "gc", "verdict"]
    assert [l.split()[0] for l in lines[1:]] == sorted(p.name for p in CORPUS.glob("*.lp"))
    assert all(l.split()[-1] == "ok" for l in lines[1:])


def test_corpus_defaults_to_bundled_programs():
    code, out, _ = run("corpus")
    assert code == 0 and "takefirstn.lp" in out


def test_corpus_tampered_expectation(tmp_path):
    for p in CORPUS.glob("*.lp"):
        shutil.copy(p, tmp_path / p.name)
    target = tmp_path / "bitlist.lp"
    target.write_text(target.read_text().replace("% expect: guarded, success", "% expect: unguarded, success"))
    code, out, err = run("corpus", str(tmp_path))
    assert code == 5
    assert "MISMATCH" in out and "bitlist.lp" in err


def test_corpus_empty_directory(tmp_path):
    code, _, err = run("corpus", str(tmp_path))
    assert code == 1 and "no .lp programs" in err


def test_read_header():
    assert read_header("% expect: guarded, success\n% query: p(X)\np(a).\n") == (("guarded", "success"), "p(X)")
    assert read_header("p(a).\n") == (None, None)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "coalp", "check", lp("bitstream")], capture_output=True, text=True)
    assert proc.returncode == 0 and "verdict: guarded" in proc.stdout
