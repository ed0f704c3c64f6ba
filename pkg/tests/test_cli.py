import json

import pytest

from dpc import fixtures
from dpc.cli import EXIT_BENCH, EXIT_GRAMMAR, EXIT_OK, EXIT_PARSE, EXIT_USAGE, main
from dpc.grammar import normalize, parse_grammar

from oracles import SENTENCES


def run(capsys, *argv):
    rc = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return rc, out, err


def _grammar(name):
    return str(fixtures.path(name))


@pytest.fixture
def table(tmp_path, capsys):
    def make(name, mode):
        out = tmp_path / f"{name}-{mode}.dpt"
        assert run(capsys, "tablegen", _grammar(name), "--mode", mode, "-o", out)[0] == EXIT_OK
        return out
    return make


def _write(tmp_path, text, name="input.txt"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


# analyze

def test_analyze_listing1a(capsys):
    rc, out, _ = run(capsys, "analyze", _grammar("listing1a"))
    assert rc == EXIT_OK
    assert "deep conflicts: 1 (1 operator-style)" in out
    assert "operator-style: Exp.Add arg 0 rightmost rm={Exp.If}" in out
    assert "bit 0: Exp.If" in out


def test_analyze_listing1b(capsys):
    rc, out, _ = run(capsys, "analyze", _grammar("listing1b"))
    assert rc == EXIT_OK and "deep conflicts: 1 (1 dangling-else)" in out


def test_analyze_arith_json(capsys):
    rc, out, _ = run(capsys, "analyze", _grammar("arith"), "--format", "json")
    rep = json.loads(out)
    assert rc == EXIT_OK and rep["conflicts"] == [] and len(rep["shallow"]) > 0 and rep["universe"] == []


def test_analyze_bad_grammar(capsys, tmp_path):
    bad = _write(tmp_path, "start symbol Exp\ncontext-free syntax\n", "bad.def")
    rc, _, err = run(capsys, "analyze", bad)
    assert rc == EXIT_GRAMMAR and "start symbol has no productions" in err


# rewrite

def test_rewrite_listing3(capsys, tmp_path):
    out = tmp_path / "rw.def"
    assert run(capsys, "rewrite", _grammar("listing3"), "-o", out)[0] == EXIT_OK
    g = parse_grammar(out.read_text())
    contextual = {p.lhs for p in g.cf_productions if "{" in p.lhs}
    assert contextual == {"Exp{|Exp.If}"}
    under = sorted(p.constructor for p in g.cf_productions if p.lhs == "Exp{|Exp.If}")
    assert under == ["Add", "Int"]
    ng = normalize(g)
    assert [str(s) for s in ng.find("Exp", "Add").rhs if str(s) != "LAYOUT?"] == ["Exp{|Exp.If}", '"+"', "Exp"]


# parse

def test_parse_datadep_ast(capsys, tmp_path, table):
    t = table("listing1a", "datadep")
    text, preferred, _ = SENTENCES["listing1a"]
    f = _write(tmp_path, text)
    rc, out, err = run(capsys, "parse", "--table", t, "--expect-unambiguous", f)
    assert rc == EXIT_OK
    assert out.strip() == preferred
    stats = json.loads(err)
    assert stats["ambiguities"] == 0 and stats["blocked"] == 1
    assert set(stats) == {"file", "nodes", "reductions", "blocked", "clusters", "ambiguities"}


def test_parse_none_expect_unambiguous_fails(capsys, tmp_path, table):
    t = table("listing1a", "none")
    f = _write(tmp_path, SENTENCES["listing1a"][0])
    rc, out, err = run(capsys, "parse", "--table", t, "--mode", "none", "--expect-unambiguous", f)
    assert rc == EXIT_PARSE
    assert out.startswith("(amb ") and "1 ambiguity cluster" in err


def test_parse_stray_character(capsys, tmp_path, table):
    t = table("listing3", "datadep")
    f = _write(tmp_path, "INT ?+ INT")
    rc, _, err = run(capsys, "parse", "--table", t, f)
    assert rc == EXIT_PARSE and "offset 4" in err


def test_parse_stats_and_forest(capsys, tmp_path, table):
    t = table("listing3", "datadep")
    f = _write(tmp_path, "INT + if INT")
    rc, out, _ = run(capsys, "parse", "--table", t, "--out", "stats", f)
    assert rc == EXIT_OK and json.loads(out)["nodes"] > 0
    rc, out, _ = run(capsys, "parse", "--table", t, "--out", "forest", f)
    assert rc == EXIT_OK and out.startswith("#0 ")


def test_parse_corrupt_table(capsys, tmp_path):
    t = _write(tmp_path, '{"formatVersion": 99}', "bad.dpt")
    f = _write(tmp_path, "INT")
    assert run(capsys, "parse", "--table", t, f)[0] == EXIT_GRAMMAR


def test_parse_missing_table_is_usage_error(capsys, tmp_path):
    assert run(capsys, "parse", "--table", tmp_path / "nope.dpt", "x")[0] == EXIT_USAGE


def test_unknown_command_and_bad_option(capsys):
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    assert run(capsys, "tablegen", _grammar("listing3"), "--mode", "fast", "-o", "x")[0] == EXIT_USAGE


# gen-corpus and bench

def _files(d):
    return sorted(p.relative_to(d).as_posix() for p in d.rglob("*.txt"))


def test_gen_corpus_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        rc, out, _ = run(capsys, "gen-corpus", "--grammar", _grammar("mini-ml"), "-o", d, "--count", 100,
                         "--max-depth", 7, "--seed", 3)
        assert rc == EXIT_OK
    assert out.strip() == "with-conflicts: 47, without-conflicts: 53"
    assert len(_files(a)) == 100 and _files(a) == _files(b)
    assert all((a / f).read_text() == (b / f).read_text() for f in _files(a))


def test_gen_corpus_zero(capsys, tmp_path):
    rc, _, _ = run(capsys, "gen-corpus", "--grammar", _grammar("mini-ml"), "-o", tmp_path / "z", "--count", 0,
                   "--max-depth", 5, "--seed", 1)
    assert rc == EXIT_OK and _files(tmp_path / "z") == []
    assert (tmp_path / "z" / "with-conflicts").is_dir() and (tmp_path / "z" / "without-conflicts").is_dir()


def test_gen_corpus_depth_too_small(capsys, tmp_path):
    rc, _, err = run(capsys, "gen-corpus", "--grammar", _grammar("mini-ml"), "-o", tmp_path / "z", "--count", 3,
                     "--max-depth", 1, "--seed", 1)
    assert rc == EXIT_GRAMMAR and "depth 1" in err


def test_bench_empty_corpus_reports_na(capsys, tmp_path):
    (tmp_path / "c" / "without-conflicts").mkdir(parents=True)
    rc, out, _ = run(capsys, "bench", "--grammar", _grammar("listing3"), "--corpus", tmp_path / "c",
                     "--modes", "none,datadep", "--forks", 1)
    assert rc == EXIT_OK
    rows = [line.split() for line in out.splitlines()[1:]]
    assert len(rows) == 4 and all(r[-1] == "n/a" and r[-2] == "n/a" for r in rows)


def test_bench_csv_output(capsys, tmp_path):
    run(capsys, "gen-corpus", "--grammar", _grammar("listing3"), "-o", tmp_path / "c", "--count", 10,
        "--max-depth", 5, "--seed", 2)
    rc, out, _ = run(capsys, "bench", "--grammar", _grammar("listing3"), "--corpus", tmp_path / "c",
                     "--forks", 2, "--format", "csv", "-o", tmp_path / "r.csv")
    assert rc == EXIT_OK
    assert out == (tmp_path / "r.csv").read_text()
    assert out.splitlines()[0] == "mode,partition,fork,seconds,files,ambiguities,blocked"
    assert len(out.splitlines()) == 1 + 2 * 3 * 2


def test_bench_aborts_on_unparseable_file(capsys, tmp_path):
    d = tmp_path / "c" / "with-conflicts"
    d.mkdir(parents=True)
    (d / "bad.txt").write_text("INT + +")
    rc, _, err = run(capsys, "bench", "--grammar", _grammar("listing3"), "--corpus", tmp_path / "c", "--forks", 1)
    assert rc == EXIT_BENCH and "bad.txt" in err


def test_bench_rejects_bad_config(capsys, tmp_path):
    assert run(capsys, "bench", "--grammar", _grammar("listing3"), "--corpus", tmp_path, "--forks", 0)[0] == EXIT_USAGE
    assert run(capsys, "bench", "--grammar", _grammar("listing3"), "--corpus", tmp_path,
               "--modes", "fast")[0] == EXIT_USAGE
