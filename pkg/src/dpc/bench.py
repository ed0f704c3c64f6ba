"""Batch-parse benchmark across disambiguation modes and corpus partitions."""

from __future__ import annotations

import csv
import gc
import io
import statistics
import time
from dataclasses import dataclass
from pathlib import Path

from .corpus import PARTITIONS, read_partition
from .engine import count_ambiguities, parse
from .pipeline import PARSE_MODE, TABLE_MODES, Compiled

CSV_COLUMNS = ("mode", "partition", "fork", "seconds", "files", "ambiguities", "blocked")
DEFAULT_FORKS = 15


class BenchAbort(RuntimeError):
    pass


@dataclass(frozen=True)
class BenchConfig:
    modes: tuple
    forks: int = DEFAULT_FORKS
    warmups: int = 0
    partitions: tuple = PARTITIONS

    def __post_init__(self):
        if self.forks < 1:
            raise ValueError("forks must be at least 1")
        if not self.modes:
            raise ValueError("at least one mode is required")
        for m in self.modes:
            if m not in TABLE_MODES:
                raise ValueError(f"unknown mode {m!r}")


@dataclass(frozen=True)
class Row:
    mode: str
    partition: str
    fork: int
    seconds: float
    files: int
    ambiguities: int
    blocked: int


@dataclass(frozen=True)
class Summary:
    mode: str
    partition: str
    forks: int
    total: float
    median: float
    mad: float
    files: int
    ambiguities: int
    blocked: int
    speedup: float | None  # median(rewrite) / median(mode)
    cost: float | None  # median(mode) / median(none)


def mad(values) -> float:
    m = statistics.median(values)
    return statistics.median(abs(v - m) for v in values)


def _ratio(a: float | None, b: float | None) -> float | None:
    if a is None or b is None or b == 0:
        return None
    return a / b


def summarize(rows) -> list[Summary]:
    groups: dict[tuple[str, str], list[Row]] = {}
    for r in rows:
        groups.setdefault((r.mode, r.partition), []).append(r)
    medians = {k: statistics.median(r.seconds for r in v) for k, v in groups.items()}
    out = []
    for (mode, part), rs in sorted(groups.items(), key=lambda kv: (TABLE_MODES.index(kv[0][0]), kv[0][1])):
        files = rs[0].files
        med = medians[(mode, part)] if files else None
        base_rw = medians.get(("rewrite", part)) if files else None
        base_none = medians.get(("none", part)) if files else None
        out.append(Summary(mode, part, len(rs), sum(r.seconds for r in rs), medians[(mode, part)],
                           mad([r.seconds for r in rs]), files, rs[0].ambiguities, rs[0].blocked,
                           _ratio(base_rw, med), _ratio(med, base_none)))
    return out


def run_bench(compiled: Compiled, corpus_dir: Path, config: BenchConfig) -> list[Row]:
    corpus = {p: read_partition(corpus_dir, p) for p in config.partitions}
    tables = {m: compiled.table(m) for m in config.modes}
    rows = []
    for fork in range(config.forks):
        # modes are interleaved per fork, in alternating order, so drift and warm caches favour none of them
        order = config.modes if fork % 2 == 0 else config.modes[::-1]
        for mode in order:
            for part, files in corpus.items():
                rows.append(_batch(tables[mode], PARSE_MODE[mode], mode, part, fork, files, config.warmups))
    return rows


def _batch(table, parse_mode, mode, part, fork, files, warmups) -> Row:
    texts = [t for _, t in files]
    for _ in range(warmups):
        for t in texts:
            parse(table, t, parse_mode)
    results = []
    # like timeit: no cyclic collector pauses inside the timed region (the GSS holds no cycles)
    gc.collect()
    gc.disable()
    try:
        t0 = time.perf_counter()
        for t in texts:
            results.append(parse(table, t, parse_mode))
        seconds = time.perf_counter() - t0
    finally:
        gc.enable()
    amb = blocked = 0
    for (name, _), r in zip(files, results):
        if not r.success:
            raise BenchAbort(f"{name} does not parse in mode {mode} (offset {r.error_offset})")
        amb += count_ambiguities(r.root) > 0
        blocked += r.stats.blocked
    return Row(mode, part, fork, seconds, len(files), amb, blocked)


def write_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([r.mode, r.partition, r.fork, repr(r.seconds), r.files, r.ambiguities, r.blocked])
    return buf.getvalue()


def read_csv(text: str) -> list[Row]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV columns {reader.fieldnames}")
    return [Row(d["mode"], d["partition"], int(d["fork"]), float(d["seconds"]), int(d["files"]),
                int(d["ambiguities"]), int(d["blocked"])) for d in reader]


def _fmt(x: float | None) -> str:
    return "n/a" if x is None else f"{x:.3f}x"


def format_report(summaries) -> str:
    head = f"{'mode':<8} {'partition':<18} {'forks':>5} {'median s':>10} {'MAD s':>9} {'files':>6} " \
           f"{'amb':>5} {'blocked':>8} {'speedup':>8} {'cost':>8}"
    lines = [head]
    for s in summaries:
        lines.append(f"{s.mode:<8} {s.partition:<18} {s.forks:>5} {s.median:>10.4f} {s.mad:>9.4f} {s.files:>6} "
                     f"{s.ambiguities:>5} {s.blocked:>8} {_fmt(s.speedup):>8} {_fmt(s.cost):>8}")
    return "\n".join(lines)
