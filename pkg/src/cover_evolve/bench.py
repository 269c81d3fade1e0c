"""Benchmark protocol: seeded repeat runs, deviation from known optima, reports.

Also hosts the exhaustive oracle used to check the GA on tiny instances.
"""

from __future__ import annotations

import csv
import json
import os
import re
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .evolution import GaConfig, RunResult, run
from .instance import Instance, load_instance

MAX_ORACLE_COLS = 22
CSV_FIELDS = ["instance", "variant", "best_cost", "optimum", "deviation_pct", "mean_elapsed_ms"]
TIMING_NOTE = "wall-clock milliseconds on the host machine; not normalised to any reference CPU"


@lru_cache(maxsize=None)
def known_optima() -> dict[str, dict]:
    """Published optima and sizes of the 65 OR-Library SCP instances, keyed like ``"4.1"``."""
    text = resources.files("cover_evolve").joinpath("data/known_optima.json").read_text()
    return json.loads(text)


_NAME_RE = re.compile(r"^scp(?:nr)?([4-6a-h])\.?(\d+)$", re.IGNORECASE)


def instance_id(name: str | os.PathLike) -> str:
    """Map an OR-Library file name (``scp41.txt``, ``scpnrg1``) to its table key (``4.1``, ``G.1``).

    Names that do not look like OR-Library files are returned unchanged (minus extension).
    """
    stem = Path(name).name.split(".txt")[0].split(".gz")[0]
    if re.fullmatch(r"[4-6A-Ha-h]\.\d+", stem):
        return stem.upper()
    match = _NAME_RE.match(stem)
    if not match:
        return stem
    return f"{match.group(1).upper()}.{int(match.group(2))}"


def orlib_filename(key: str) -> str:
    """Inverse of :func:`instance_id` for the 65 table keys."""
    group, num = key.split(".")
    if group in "ABCD" or group.isdigit():
        return f"scp{group.lower()}{num}.txt"
    return f"scpnr{group.lower()}{num}.txt"


def brute_force_optimum(instance: Instance, max_cols: int = MAX_ORACLE_COLS) -> tuple[int, tuple[int, ...]]:
    """Exact minimum-cost cover by exhaustive include/exclude enumeration.

    Branches whose partial cost already reaches the incumbent are cut, as are
    branches whose remaining columns cannot cover the open rows. Columns are
    tried include-first in index order, so among equal-cost covers the
    lexicographically smallest is found first and kept.
    """
    n = instance.num_cols
    if n > max_cols:
        raise ValueError(f"brute force limited to {max_cols} columns, instance has {n}")
    masks = [sum(1 << i for i in rows) for rows in instance.rows_of_col]
    costs = instance.costs
    full = (1 << instance.num_rows) - 1
    reach = [0] * (n + 1)
    for j in range(n - 1, -1, -1):
        reach[j] = reach[j + 1] | masks[j]
    if reach[0] != full:
        raise ValueError("instance is not coverable")

    best_cost = sum(costs) + 1
    best: tuple[int, ...] = ()
    chosen: list[int] = []

    def search(j: int, covered: int, cost: int) -> None:
        nonlocal best_cost, best
        if cost >= best_cost:
            return
        if covered == full:
            best_cost, best = cost, tuple(chosen)
            return
        if j == n or (covered | reach[j]) != full:
            return
        chosen.append(j)
        search(j + 1, covered | masks[j], cost + costs[j])
        chosen.pop()
        search(j + 1, covered, cost)

    search(0, 0, 0)
    return best_cost, best


@dataclass(frozen=True)
class BenchSpec:
    instance_path: str
    known_optimum: int | None = None
    runs: int = 10
    base_seed: int = 0
    config: GaConfig = field(default_factory=GaConfig)

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")


@dataclass(frozen=True)
class RunSummary:
    seed: int
    best_cost: int
    generations: int
    evaluations: int
    elapsed_ms: float
    chosen_columns: list[int]

    @classmethod
    def from_result(cls, seed: int, result: RunResult) -> "RunSummary":
        return cls(
            seed=seed,
            best_cost=result.best_cost,
            generations=result.generations_run,
            evaluations=result.evaluations,
            elapsed_ms=result.elapsed * 1000.0,
            # 1-based, like the OR-Library files
            chosen_columns=[j + 1 for j in result.best_solution.chosen],
        )


def deviation_pct(cost: int, optimum: int | None) -> float | None:
    if optimum is None:
        return None
    return 100.0 * (cost - optimum) / optimum


@dataclass
class BenchReport:
    instance: str
    variant: str
    per_run: list[RunSummary]
    best_cost: int
    optimum: int | None
    deviation_pct: float | None
    mean_elapsed_ms: float

    @classmethod
    def from_runs(cls, instance: str, variant: str, runs: Sequence[RunSummary], optimum: int | None):
        best = min(r.best_cost for r in runs)
        return cls(
            instance=instance,
            variant=variant,
            per_run=list(runs),
            best_cost=best,
            optimum=optimum,
            deviation_pct=deviation_pct(best, optimum),
            mean_elapsed_ms=statistics.fmean(r.elapsed_ms for r in runs),
        )

    def to_json(self) -> dict:
        return {
            "instance": self.instance,
            "variant": self.variant,
            "runs": [asdict(r) for r in self.per_run],
            "best_cost": self.best_cost,
            "optimum": self.optimum,
            "deviation_pct": self.deviation_pct,
            "mean_elapsed_ms": self.mean_elapsed_ms,
            "timing": TIMING_NOTE,
        }

    @classmethod
    def from_json(cls, data: dict) -> "BenchReport":
        runs = [RunSummary(**r) for r in data["runs"]]
        return cls(
            instance=data["instance"],
            variant=data["variant"],
            per_run=runs,
            best_cost=data["best_cost"],
            optimum=data.get("optimum"),
            deviation_pct=data.get("deviation_pct"),
            mean_elapsed_ms=data["mean_elapsed_ms"],
        )

    def csv_row(self) -> dict:
        return {
            "instance": self.instance,
            "variant": self.variant,
            "best_cost": self.best_cost,
            "optimum": "" if self.optimum is None else self.optimum,
            "deviation_pct": "" if self.deviation_pct is None else f"{self.deviation_pct:.4f}",
            "mean_elapsed_ms": f"{self.mean_elapsed_ms:.1f}",
        }


def write_json(report: BenchReport, path: str | os.PathLike) -> None:
    Path(path).write_text(json.dumps(report.to_json(), indent=2) + "\n")


def append_csv(report: BenchReport, path: str | os.PathLike) -> None:
    """Append one summary row, writing the header if the file is new or empty."""
    p = Path(path)
    fresh = not p.exists() or p.stat().st_size == 0
    with p.open("a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS)
        if fresh:
            writer.writeheader()
        writer.writerow(report.csv_row())


def default_workers() -> int:
    env = os.environ.get("COVER_EVOLVE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"COVER_EVOLVE_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _one_run(args: tuple[Instance, GaConfig]) -> RunSummary:
    instance, config = args
    return RunSummary.from_result(config.seed, run(instance, config))


def run_bench(
    spec: BenchSpec,
    json_path: str | os.PathLike | None = None,
    csv_path: str | os.PathLike | None = None,
    workers: int | None = None,
    instance: Instance | None = None,
) -> BenchReport:
    """Run ``spec.runs`` seeded GA runs (seeds ``base_seed + k``) and aggregate them."""
    if instance is None:
        instance = load_instance(spec.instance_path)
    configs = [replace(spec.config, seed=spec.base_seed + k) for k in range(spec.runs)]
    workers = min(workers or default_workers(), spec.runs)
    jobs = [(instance, c) for c in configs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_one_run, jobs))
    else:
        summaries = [_one_run(j) for j in jobs]
    report = BenchReport.from_runs(
        instance_id(spec.instance_path), spec.config.variant.label, summaries, spec.known_optimum
    )
    if json_path is not None:
        write_json(report, json_path)
    if csv_path is not None:
        append_csv(report, csv_path)
    return report


@dataclass(frozen=True)
class SummaryRow:
    group: str
    mean_deviation_pct: float | None
    mean_elapsed_ms: float
    instances: int


def problem_set(instance: str) -> str:
    """Group key: the part before the dot (``"4.1"`` -> ``"4"``)."""
    return instance.split(".")[0]


def _mean_or_none(values: Iterable[float | None]) -> float | None:
    present = [v for v in values if v is not None]
    return statistics.fmean(present) if present else None


def summarize(
    reports: Sequence[BenchReport], grouping: Callable[[str], str] = problem_set
) -> list[SummaryRow]:
    """Per-group mean deviation and time, then two overall rows.

    ``Overall (groups)`` averages the group rows; ``Overall (instances)``
    averages every report directly.
    """
    if not reports:
        raise ValueError("nothing to summarize")
    groups: dict[str, list[BenchReport]] = {}
    for rep in reports:
        groups.setdefault(grouping(rep.instance), []).append(rep)
    rows = [
        SummaryRow(
            key,
            _mean_or_none(r.deviation_pct for r in reps),
            statistics.fmean(r.mean_elapsed_ms for r in reps),
            len(reps),
        )
        for key, reps in groups.items()
    ]
    rows.append(
        SummaryRow(
            "Overall (groups)",
            _mean_or_none(r.mean_deviation_pct for r in rows),
            statistics.fmean(r.mean_elapsed_ms for r in rows),
            len(reports),
        )
    )
    rows.append(
        SummaryRow(
            "Overall (instances)",
            _mean_or_none(r.deviation_pct for r in reports),
            statistics.fmean(r.mean_elapsed_ms for r in reports),
            len(reports),
        )
    )
    return rows


def format_summary(rows: Sequence[SummaryRow]) -> str:
    lines = [f"{'Set':<20} {'Dev.':>8} {'Time(ms)':>12} {'n':>4}"]
    for r in rows:
        dev = "-" if r.mean_deviation_pct is None else f"{r.mean_deviation_pct:.2f}%"
        lines.append(f"{r.group:<20} {dev:>8} {r.mean_elapsed_ms:>12.1f} {r.instances:>4}")
    return "\n".join(lines)


def orlib_dir() -> Path | None:
    """Directory holding OR-Library SCP files, if any.

    Looks at ``COVER_EVOLVE_ORLIB`` first, then ``data/orlib`` under the
    current directory.
    """
    env = os.environ.get("COVER_EVOLVE_ORLIB")
    candidates = [Path(env)] if env else []
    candidates.append(Path.cwd() / "data" / "orlib")
    for c in candidates:
        if c.is_dir():
            return c
    return None


def find_orlib_file(key: str, directory: Path | None = None) -> Path | None:
    directory = directory or orlib_dir()
    if directory is None:
        return None
    name = orlib_filename(key)
    for cand in (name, name[:-4], name + ".gz"):
        p = directory / cand
        if p.is_file():
            return p
    return None
