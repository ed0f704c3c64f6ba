"""``dpc`` command line: analyze, rewrite, tablegen, parse, bench, gen-corpus."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import bench as benchmod
from .analysis import LEFTMOST
from .corpus import CorpusError, generate, write_corpus
from .engine import DATADEP, MODES, count_ambiguities, parse
from .grammar import GrammarError, denormalize, pretty_print
from .implode import forest_dump, implode, to_sexpr
from .pipeline import TABLE_MODES, Compiled, compile_grammar
from .tables import TableFormatError, deserialize_table, serialize_table

EXIT_OK, EXIT_USAGE, EXIT_GRAMMAR, EXIT_PARSE, EXIT_BENCH = 0, 1, 2, 3, 4


def _load(path: str) -> Compiled:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise click.UsageError(f"cannot read grammar {path}: {e.strerror}") from None
    return compile_grammar(text)


def analysis_report(c: Compiled) -> dict:
    g = c.grammar
    return {
        "shallow": [{"parent": g.label(p), "arg": a, "child": g.label(q)} for p, a, q in sorted(c.shallow)],
        "conflicts": [{"class": k.kind, "production": g.label(k.production), "arg": k.arg, "side": k.side,
                       "forbidden": [g.label(i) for i in sorted(k.forbidden)]} for k in c.conflicts],
        "universe": [{"bit": i, "production": g.label(pid)} for i, pid in enumerate(c.universe.members)],
    }


def _text_report(rep: dict) -> str:
    lines = [f"shallow filter: {len(rep['shallow'])} entries"]
    lines += [f"  {e['parent']} arg {e['arg']} excludes {e['child']}" for e in rep["shallow"]]
    by_class: dict[str, int] = {}
    for k in rep["conflicts"]:
        by_class[k["class"]] = by_class.get(k["class"], 0) + 1
    summary = ", ".join(f"{n} {k}" for k, n in by_class.items()) or "none"
    lines.append(f"deep conflicts: {len(rep['conflicts'])} ({summary})")
    for k in rep["conflicts"]:
        spine = "lm" if k["side"] == LEFTMOST else "rm"
        lines.append(f"  {k['class']}: {k['production']} arg {k['arg']} {k['side']} "
                     f"{spine}={{{', '.join(k['forbidden'])}}}")
    lines.append(f"token universe: {len(rep['universe'])} member(s)")
    lines += [f"  bit {u['bit']}: {u['production']}" for u in rep["universe"]]
    return "\n".join(lines)


@click.group()
def cli():
    """Scannerless GLR toolkit with deep priority conflict disambiguation."""


@cli.command()
@click.argument("grammar")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text")
def analyze(grammar, fmt):
    """Report shallow filter, deep conflicts and the token universe."""
    rep = analysis_report(_load(grammar))
    click.echo(json.dumps(rep, indent=2) if fmt == "json" else _text_report(rep))
    return EXIT_OK


@cli.command()
@click.argument("grammar")
@click.option("-o", "out", required=True, help="output grammar file")
def rewrite(grammar, out):
    """Rewrite contextual symbols away by duplicating productions."""
    c = _load(grammar)
    Path(out).write_text(pretty_print(denormalize(c.rewritten)), encoding="utf-8")
    return EXIT_OK


@cli.command()
@click.argument("grammar")
@click.option("--mode", type=click.Choice(TABLE_MODES), default="datadep")
@click.option("-o", "out", required=True, help="output table file")
def tablegen(grammar, mode, out):
    """Generate a serialized parse table."""
    t = _load(grammar).table(mode)
    for d in t.diagnostics:
        click.echo(f"note: {d}", err=True)
    Path(out).write_bytes(serialize_table(t))
    return EXIT_OK


@cli.command("parse")
@click.option("--table", "table_path", required=True)
@click.option("--mode", type=click.Choice(MODES), default=DATADEP,
              help="datadep degrades to none for tables without a token universe")
@click.option("--out", "out_kind", type=click.Choice(["ast", "forest", "stats"]), default="ast")
@click.option("--expect-unambiguous", is_flag=True)
@click.argument("files", nargs=-1, required=True)
def parse_cmd(table_path, mode, out_kind, expect_unambiguous, files):
    """Parse input files and print ASTs, forests or statistics."""
    try:
        table = deserialize_table(Path(table_path).read_bytes())
    except OSError as e:
        raise click.UsageError(f"cannot read table {table_path}: {e.strerror}") from None
    status = EXIT_OK
    for f in files:
        try:
            text = Path(f).read_text(encoding="utf-8")
        except OSError as e:
            click.echo(f"{f}: {e.strerror}", err=True)
            status = EXIT_PARSE
            continue
        r = parse(table, text, mode)
        if not r.success:
            click.echo(f"{f}: parse error at offset {r.error_offset}; expected {r.expected}", err=True)
            status = EXIT_PARSE
            continue
        amb = count_ambiguities(r.root)
        if out_kind == "ast":
            click.echo(to_sexpr(implode(r)))
        elif out_kind == "forest":
            click.echo(forest_dump(r))
        stats = {"file": f, **r.stats.as_dict(), "ambiguities": amb}
        click.echo(json.dumps(stats, sort_keys=True), err=out_kind != "stats")
        if expect_unambiguous and amb:
            click.echo(f"{f}: {amb} ambiguity cluster(s)", err=True)
            status = EXIT_PARSE
    return status


@cli.command()
@click.option("--grammar", required=True)
@click.option("--corpus", required=True, type=click.Path(file_okay=False))
@click.option("--modes", default="none,rewrite,datadep", help="comma-separated subset of none,rewrite,datadep")
@click.option("--forks", type=int, default=benchmod.DEFAULT_FORKS)
@click.option("--warmups", type=int, default=0)
@click.option("--format", "fmt", type=click.Choice(["csv", "text"]), default="text")
@click.option("-o", "out", default=None, help="write the raw CSV rows here")
def bench(grammar, corpus, modes, forks, warmups, fmt, out):
    """Time batch parsing of a partitioned corpus in several modes."""
    try:
        config = benchmod.BenchConfig(tuple(m.strip() for m in modes.split(",") if m.strip()), forks, warmups)
    except ValueError as e:
        raise click.UsageError(str(e)) from None
    c = _load(grammar)
    try:
        rows = benchmod.run_bench(c, Path(corpus), config)
    except benchmod.BenchAbort as e:
        click.echo(f"benchmark aborted: {e}", err=True)
        return EXIT_BENCH
    raw = benchmod.write_csv(rows)
    if out:
        Path(out).write_text(raw, encoding="utf-8")
    click.echo(raw if fmt == "csv" else benchmod.format_report(benchmod.summarize(rows)), nl=fmt != "csv")
    return EXIT_OK


@cli.command("gen-corpus")
@click.option("--grammar", required=True)
@click.option("-o", "out", required=True, type=click.Path(file_okay=False))
@click.option("--count", type=click.IntRange(min=0), required=True)
@click.option("--max-depth", type=click.IntRange(min=1), required=True)
@click.option("--seed", type=int, required=True)
def gen_corpus(grammar, out, count, max_depth, seed):
    """Generate seeded random sentences split by whether they hit a deep conflict."""
    c = _load(grammar)
    try:
        counts = write_corpus(generate(c, count, max_depth, seed), Path(out))
    except CorpusError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_GRAMMAR
    click.echo(", ".join(f"{k}: {v}" for k, v in counts.items()))
    return EXIT_OK


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="dpc", standalone_mode=False)
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_USAGE
    except (GrammarError, TableFormatError) as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_GRAMMAR
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
