"""Seeded Monte Carlo sweeps over the palette size and exact tiny-case probabilities.

Every trial is a pure function of ``(n, m, r, master_seed, trial_index)``:
its seed is ``derive_seed(master_seed, r, trial_index)`` and its ``m``
colorings are consecutive blocks of one PCG64 stream seeded with it (see
:func:`random_colorings`). Aggregation only counts
statuses, so a sweep gives the same table for any number of workers.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

from scipy.stats import binomtest

from .colorings import EdgeColoring, derive_seed, random_colorings
from .errors import CapabilityError, InputError
from .perms import num_edges
from .stacking import (
    UNLIMITED, SearchBudget, SearchStatus, StackingInstance,
    find_rainbow_stacking, threshold_formulas,
)

__all__ = [
    "ExperimentConfig", "TrialRecord", "SweepRow", "SweepTable",
    "run_trial", "run_sweep", "wilson_interval", "exact_existence_probability",
    "table_to_csv", "table_from_csv", "table_to_json", "table_from_json",
    "table_to_plot_data", "emit_outputs", "sweep_schema",
]

EXACT_PROB_GUARD = 10 ** 7
CSV_HEADER = ["r", "found", "exhausted", "timeout", "p_hat", "ci_lo", "ci_hi",
              "r_star", "r_lower", "r_upper"]


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    m: int
    r_values: tuple[int, ...]
    trials_per_r: int
    master_seed: int
    budget: SearchBudget = UNLIMITED
    omega: float = 0.0

    def __post_init__(self):
        rv = tuple(int(r) for r in self.r_values)
        object.__setattr__(self, "r_values", rv)
        if not rv:
            raise InputError("r_values must be nonempty")
        if any(b <= a for a, b in zip(rv, rv[1:])):
            raise InputError("r_values must be strictly increasing")
        if rv[0] < 1:
            raise InputError("palette sizes must be at least 1")
        if self.trials_per_r < 1:
            raise InputError("trials_per_r must be at least 1")
        if self.n < 2 or self.m < 1:
            raise InputError("sweeps need n >= 2 and m >= 1")


@dataclass(frozen=True)
class TrialRecord:
    r: int
    trial_index: int
    seed: int
    status: SearchStatus
    nodes_expanded: int
    elapsed_millis: float = field(compare=False)


@dataclass(frozen=True)
class SweepRow:
    r: int
    found: int
    exhausted: int
    timeout: int
    p_hat: float | None
    ci_lo: float | None
    ci_hi: float | None


@dataclass(frozen=True)
class SweepTable:
    n: int
    m: int
    omega: float
    trials_per_r: int
    master_seed: int
    r_star: float
    r_lower: float
    r_upper: float
    rows: tuple[SweepRow, ...]

    def row(self, r: int) -> SweepRow:
        for row in self.rows:
            if row.r == r:
                return row
        raise KeyError(r)


def trial_instance(n: int, m: int, r: int, seed: int) -> StackingInstance:
    return StackingInstance(n, m, r, random_colorings(n, r, m, seed))


def run_trial(n: int, m: int, r: int, master_seed: int, trial_index: int,
              budget: SearchBudget = UNLIMITED) -> TrialRecord:
    seed = derive_seed(master_seed, r, trial_index)
    start = time.perf_counter()
    out = find_rainbow_stacking(trial_instance(n, m, r, seed), budget)
    ms = (time.perf_counter() - start) * 1000
    return TrialRecord(r, trial_index, seed, out.status, out.nodes_expanded, ms)


def _run_block(args) -> list[TrialRecord]:
    n, m, r, master_seed, lo, hi, budget = args
    return [run_trial(n, m, r, master_seed, i, budget) for i in range(lo, hi)]


def wilson_interval(successes: int, trials: int) -> tuple[float | None, float | None]:
    """95% Wilson score interval; ``(None, None)`` when there are no trials."""
    if trials == 0:
        return None, None
    ci = binomtest(successes, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return float(ci.low), float(ci.high)


def summarize(config: ExperimentConfig, records: Sequence[TrialRecord]) -> SweepTable:
    rows = []
    for r in config.r_values:
        sts = [rec.status for rec in records if rec.r == r]
        found = sts.count(SearchStatus.FOUND)
        exhausted = sts.count(SearchStatus.EXHAUSTED)
        timeout = sts.count(SearchStatus.BUDGET)
        decided = found + exhausted
        p_hat = found / decided if decided else None
        lo, hi = wilson_interval(found, decided)
        rows.append(SweepRow(r, found, exhausted, timeout, p_hat, lo, hi))
    r_star, r_lower, r_upper = threshold_formulas(config.n, config.m, config.omega)
    return SweepTable(config.n, config.m, float(config.omega), config.trials_per_r,
                      config.master_seed, r_star, r_lower, r_upper, tuple(rows))


def run_sweep(config: ExperimentConfig, workers: int = 1,
              return_records: bool = False):
    """Run every trial of ``config`` and aggregate per palette size.

    With ``return_records=True`` returns ``(table, records)``.
    """
    if workers < 1:
        raise InputError("workers must be at least 1")
    n, m, T = config.n, config.m, config.trials_per_r
    if workers == 1:
        records = [run_trial(n, m, r, config.master_seed, i, config.budget)
                   for r in config.r_values for i in range(T)]
    else:
        block = max(1, math.ceil(T / (4 * workers)))
        tasks = [(n, m, r, config.master_seed, lo, min(T, lo + block), config.budget)
                 for r in config.r_values for lo in range(0, T, block)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            records = [rec for chunk in ex.map(_run_block, tasks) for rec in chunk]
    records.sort(key=lambda rec: (rec.r, rec.trial_index))
    table = summarize(config, records)
    return (table, records) if return_records else table


def exact_existence_probability(n: int, m: int, r: int, override: bool = False) -> Fraction:
    """Fraction of all ``r^{m C(n,2)}`` coloring tuples that admit a stacking."""
    if r < 1 or m < 1 or n < 0:
        raise InputError("need n >= 0, m >= 1, r >= 1")
    ne = num_edges(n)
    total = r ** (m * ne)
    if total > EXACT_PROB_GUARD and not override:
        raise CapabilityError(f"{total} coloring tuples exceed the guard of {EXACT_PROB_GUARD}")
    good = 0
    for cols in itertools.product(range(r), repeat=m * ne):
        inst = StackingInstance(n, m, r, tuple(
            EdgeColoring(n, r, cols[k * ne:(k + 1) * ne]) for k in range(m)))
        if find_rainbow_stacking(inst).found:
            good += 1
    return Fraction(good, total)


# -- serialization ------------------------------------------------------------

def _fmt(x) -> str:
    return "" if x is None else repr(x)


def _opt_float(s: str) -> float | None:
    return None if s == "" else float(s)


def table_to_csv(table: SweepTable) -> str:
    buf = io.StringIO()
    buf.write(f"# n={table.n} m={table.m} omega={table.omega!r} "
              f"trials_per_r={table.trials_per_r} master_seed={table.master_seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in table.rows:
        w.writerow([row.r, row.found, row.exhausted, row.timeout, _fmt(row.p_hat),
                    _fmt(row.ci_lo), _fmt(row.ci_hi), repr(table.r_star),
                    repr(table.r_lower), repr(table.r_upper)])
    return buf.getvalue()


def table_from_csv(text: str) -> SweepTable:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#"):
        raise InputError("sweep CSV must start with a '# n=... m=...' metadata line")
    meta = dict(tok.split("=", 1) for tok in lines[0][1:].split())
    reader = csv.reader(lines[1:])
    header = next(reader)
    if header != CSV_HEADER:
        raise InputError(f"unexpected CSV header {header}")
    rows, marks = [], None
    for rec in reader:
        r, found, exh, to = (int(x) for x in rec[:4])
        rows.append(SweepRow(r, found, exh, to, *(_opt_float(x) for x in rec[4:7])))
        marks = tuple(float(x) for x in rec[7:10])
    if marks is None:
        raise InputError("sweep CSV has no rows")
    return SweepTable(int(meta["n"]), int(meta["m"]), float(meta["omega"]),
                      int(meta["trials_per_r"]), int(meta["master_seed"]),
                      *marks, tuple(rows))


def table_to_json(table: SweepTable) -> str:
    d = asdict(table)
    d["rows"] = [asdict(row) for row in table.rows]
    return json.dumps(d, indent=2) + "\n"


def table_from_json(text: str) -> SweepTable:
    d = json.loads(text)
    rows = tuple(SweepRow(**row) for row in d.pop("rows"))
    return SweepTable(**d, rows=rows)


def table_to_plot_data(table: SweepTable) -> str:
    lines = [f"# n={table.n} m={table.m} trials_per_r={table.trials_per_r}",
             f"# r_star {table.r_star!r}",
             f"# r_lower {table.r_lower!r}",
             f"# r_upper {table.r_upper!r}",
             "# r p_hat"]
    for row in table.rows:
        lines.append(f"{row.r} {'nan' if row.p_hat is None else repr(row.p_hat)}")
    return "\n".join(lines) + "\n"


def sweep_schema() -> dict:
    text = resources.files("rainbowstack").joinpath("data/sweep_table.schema.json").read_text()
    return json.loads(text)


def emit_outputs(table: SweepTable, fmt: str, path) -> list[Path]:
    """Write ``csv``, ``json``, ``plot`` or ``all`` of them next to ``path``.

    For ``all`` (or when the suffix does not match) the suffix of ``path`` is
    replaced by ``.csv``, ``.json`` and ``.dat`` respectively.
    """
    writers = {"csv": (".csv", table_to_csv), "json": (".json", table_to_json),
               "plot": (".dat", table_to_plot_data)}
    if fmt == "all":
        chosen = list(writers)
    elif fmt in writers:
        chosen = [fmt]
    else:
        raise InputError(f"unknown output format {fmt!r}")
    base = Path(path)
    out = []
    for key in chosen:
        suffix, render = writers[key]
        target = base if len(chosen) == 1 and base.suffix == suffix else base.with_suffix(suffix)
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_text(render(table), encoding="utf-8", newline="\n")
        except OSError as exc:
            raise OSError(f"cannot write {target}: {exc.strerror or exc}") from exc
        out.append(target)
    return out
