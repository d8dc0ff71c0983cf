"""Experiment protocol: tune -> validate -> final, with persistent results.

Every run's seed is derived from the master seed and the run's coordinates
``(algorithm, size, phase, config index, replication)``, so any subset of
runs can be executed in any order, on any number of workers, and replayed.
"""
from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import logging
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .config import ALGORITHMS, AlgorithmConfig, OutOfGridWarning, config_from_dict, tuned_config
from .solvers import DEFAULT_NFE_CAP, RunRecord, solve
from .tuning import (
    ConfigAggregate,
    FactorGrid,
    build_design,
    decision_matrix,
    expand_design,
    topsis_rank,
)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
PHASES = ("tuning", "validation", "final")
DEFAULT_SIZES = (8, 10, 25, 50, 100, 200, 300, 500, 1000)
CSV_HEADER = ["algorithm", "n", "phase", "config_id", "replication", "seed", "cost", "nfe", "iterations", "elapsed_ms", "capped"]
MANIFEST_NAME = "manifest.json"
RESULTS_NAME = "results.csv"
TUNING_NAME = "tuning.csv"


class SchemaVersionError(ValueError):
    pass


class PhaseError(RuntimeError):
    """A solver failed inside a phase; names the offending configuration."""


@dataclass
class ExperimentPlan:
    algorithms: tuple[str, ...] = ALGORITHMS
    sizes: tuple[int, ...] = DEFAULT_SIZES
    tuning_replications: int = 5
    validation_replications: int = 5
    final_replications: int = 10
    master_seed: int = 20240917
    weights: tuple[float, float] = (0.5, 0.5)
    nfe_cap: int = DEFAULT_NFE_CAP
    grid_overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        self.algorithms = tuple(self.algorithms)
        self.sizes = tuple(int(s) for s in self.sizes)
        self.weights = tuple(float(w) for w in self.weights)
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms in plan: {sorted(unknown)}")
        if any(s < 1 for s in self.sizes):
            raise ValueError("board sizes must be >= 1")
        for name in ("tuning_replications", "validation_replications", "final_replications", "nfe_cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if len(self.weights) != 2 or min(self.weights) < 0 or sum(self.weights) <= 0:
            raise ValueError("weights must be two non-negative numbers with a positive sum")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["algorithms"] = list(self.algorithms)
        d["sizes"] = list(self.sizes)
        d["weights"] = list(self.weights)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentPlan":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown plan keys: {sorted(extra)}")
        return cls(**data)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "ExperimentPlan":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def grid(self, algorithm: str) -> FactorGrid:
        return FactorGrid.for_algorithm(algorithm, self.grid_overrides.get(algorithm))


def derive_seed(master: int, algorithm: str, size: int, phase: str, config_index: int, replication: int) -> int:
    """64-bit seed for one run, a pure function of its coordinates."""
    key = (ALGORITHMS.index(algorithm), int(size), PHASES.index(phase), int(config_index) + 1, int(replication))
    words = np.random.SeedSequence(entropy=int(master), spawn_key=key).generate_state(2, dtype=np.uint32)
    return int(words[0]) << 32 | int(words[1])


@dataclass
class Trial:
    """One solver execution inside the protocol."""

    phase: str
    config_id: int
    replication: int
    config: AlgorithmConfig
    record: RunRecord

    def csv_row(self) -> list:
        r = self.record
        return [r.algorithm, r.n, self.phase, self.config_id, self.replication, r.seed,
                r.cost, r.nfe, r.iterations, f"{r.elapsed * 1000:.3f}", int(r.capped)]

    def to_dict(self) -> dict:
        r = self.record
        return {
            "phase": self.phase,
            "config_id": self.config_id,
            "replication": self.replication,
            "config": self.config.to_dict(),
            "algorithm": r.algorithm,
            "n": r.n,
            "seed": r.seed,
            "best": " ".join(map(str, r.best.tolist())),
            "cost": r.cost,
            "nfe": r.nfe,
            "iterations": r.iterations,
            "elapsed": r.elapsed,
            "capped": r.capped,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Trial":
        record = RunRecord(
            algorithm=d["algorithm"], n=int(d["n"]), seed=int(d["seed"]),
            best=np.array([int(v) for v in d["best"].split()], dtype=np.int64),
            cost=int(d["cost"]), nfe=int(d["nfe"]), iterations=int(d["iterations"]),
            elapsed=float(d["elapsed"]), capped=bool(d["capped"]),
        )
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OutOfGridWarning)
            config = config_from_dict(d["config"])
        return cls(d["phase"], int(d["config_id"]), int(d["replication"]), config, record)


@dataclass
class SummaryRow:
    algorithm: str
    size: int
    metric: str
    min: float
    avg: float
    max: float
    count: int
    phase: str = "final"


def aggregate(records: Sequence[RunRecord], phase: str = "final") -> list[SummaryRow]:
    """Min / mean / max of cost and NFE over a homogeneous set of runs."""
    if not records:
        raise ValueError("cannot aggregate an empty set of runs")
    keys = {(r.algorithm, r.n) for r in records}
    if len(keys) != 1:
        raise ValueError(f"records mix several (algorithm, size) pairs: {sorted(keys)}")
    algorithm, size = keys.pop()
    rows = []
    for metric in ("cost", "nfe"):
        values = sorted(int(getattr(r, metric)) for r in records)
        rows.append(SummaryRow(algorithm, size, metric, values[0], sum(values) / len(values), values[-1], len(values), phase))
    return rows


def _execute(job):
    n, config, seed, nfe_cap = job
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutOfGridWarning)
        return solve(n, config, seed, nfe_cap)


class Executor:
    """Runs batches of solver jobs, inline or on a process pool."""

    def __init__(self, workers: int = 1):
        self.workers = max(1, int(workers))
        self._pool = ProcessPoolExecutor(self.workers) if self.workers > 1 else None

    def map(self, jobs: list) -> list[RunRecord]:
        if self._pool is None:
            return [_execute(job) for job in jobs]
        return list(self._pool.map(_execute, jobs))

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _run_trials(plan, algorithm, size, phase, configs: Sequence[tuple[int, AlgorithmConfig]], reps: int, executor) -> list[Trial]:
    jobs, coords = [], []
    for config_id, config in configs:
        for rep in range(reps):
            seed = derive_seed(plan.master_seed, algorithm, size, phase, config_id, rep)
            jobs.append((size, config, seed, plan.nfe_cap))
            coords.append((config_id, rep, config))
    try:
        records = executor.map(jobs)
    except Exception as exc:
        raise PhaseError(f"{phase} phase failed for {algorithm} at n={size}: {exc}") from exc
    return [Trial(phase, cid, rep, cfg, rec) for (cid, rep, cfg), rec in zip(coords, records)]


@dataclass
class TuningOutcome:
    algorithm: str
    size: int
    config: AlgorithmConfig
    config_id: int
    aggregates: list[ConfigAggregate]
    closeness: list[float]
    trials: list[Trial]

    def report(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "size": self.size,
            "chosen_config_id": self.config_id,
            "chosen": self.config.to_dict(),
            "candidates": [
                {"config_id": i, "config": a.config.to_dict(), "mean_cost": a.mean_cost, "mean_nfe": a.mean_nfe, "closeness": c}
                for i, (a, c) in enumerate(zip(self.aggregates, self.closeness))
            ],
        }


def run_tuning_phase(plan: ExperimentPlan, algorithm: str, size: int, executor: Executor | None = None) -> TuningOutcome:
    """Run every design row ``tuning_replications`` times and pick one by TOPSIS."""
    grid = plan.grid(algorithm)
    configs = expand_design(build_design(grid), grid)
    executor = executor or Executor()
    trials = _run_trials(plan, algorithm, size, "tuning", list(enumerate(configs)), plan.tuning_replications, executor)
    aggregates = []
    for i, config in enumerate(configs):
        mine = [t.record for t in trials if t.config_id == i]
        aggregates.append(ConfigAggregate(config, float(np.mean([r.cost for r in mine])), float(np.mean([r.nfe for r in mine]))))
    result = topsis_rank(decision_matrix(aggregates, plan.weights))
    best = int(result.order[0])
    log.info("tuned %s n=%d: config %d (closeness %.4f)", algorithm, size, best, result.closeness[best])
    return TuningOutcome(algorithm, size, configs[best], best, aggregates, result.closeness.tolist(), trials)


def run_validation_phase(plan, algorithm, size, config, config_id=-1, executor=None) -> tuple[list[SummaryRow], list[Trial]]:
    trials = _run_trials(plan, algorithm, size, "validation", [(config_id, config)], plan.validation_replications, executor or Executor())
    return aggregate([t.record for t in trials], "validation"), trials


def run_final_phase(plan, algorithm, size, config, config_id=-1, executor=None) -> tuple[list[SummaryRow], list[Trial]]:
    trials = _run_trials(plan, algorithm, size, "final", [(config_id, config)], plan.final_replications, executor or Executor())
    return aggregate([t.record for t in trials], "final"), trials


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


@dataclass
class RunManifest:
    plan: ExperimentPlan
    trials: list[Trial] = field(default_factory=list)
    tuned: dict = field(default_factory=dict)  # "algorithm/size" -> {"config_id", "config", "source"}
    tuning_reports: list[dict] = field(default_factory=list)
    designs: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION
    software_version: str = __version__
    created: str = field(default_factory=_now)
    updated: str = field(default_factory=_now)

    @staticmethod
    def key(algorithm: str, size: int) -> str:
        return f"{algorithm}/{size}"

    def set_tuned(self, algorithm, size, config, config_id, source="tuning"):
        self.tuned[self.key(algorithm, size)] = {"config_id": config_id, "config": config.to_dict(), "source": source}

    def tuned_for(self, algorithm, size) -> tuple[int, AlgorithmConfig] | None:
        entry = self.tuned.get(self.key(algorithm, size))
        if entry is None:
            return None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OutOfGridWarning)
            return int(entry["config_id"]), config_from_dict(entry["config"])

    def replace_trials(self, algorithm: str, size: int, phases: Iterable[str], new: list[Trial]) -> None:
        phases = set(phases)
        self.trials = [
            t for t in self.trials
            if not (t.record.algorithm == algorithm and t.record.n == size and t.phase in phases)
        ] + new
        self.trials.sort(key=_trial_order)

    def records(self, algorithm=None, size=None, phase=None) -> list[RunRecord]:
        return [
            t.record for t in self.trials
            if (algorithm is None or t.record.algorithm == algorithm)
            and (size is None or t.record.n == size)
            and (phase is None or t.phase == phase)
        ]

    def summaries(self, phase: str = "final") -> list[SummaryRow]:
        groups = sorted({(t.record.algorithm, t.record.n) for t in self.trials if t.phase == phase}, key=_group_order)
        rows = []
        for algorithm, size in groups:
            rows.extend(aggregate(self.records(algorithm, size, phase), phase))
        return rows

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "software_version": self.software_version,
            "created": self.created,
            "updated": self.updated,
            "plan_digest": self.plan.digest(),
            "plan": self.plan.to_dict(),
            "designs": self.designs,
            "tuned": self.tuned,
            "tuning_reports": self.tuning_reports,
            "trials": [t.to_dict() for t in self.trials],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise SchemaVersionError(f"manifest schema {d.get('schema_version')} != supported {SCHEMA_VERSION}")
        plan = ExperimentPlan.from_dict(d["plan"])
        if d.get("plan_digest") not in (None, plan.digest()):
            raise SchemaVersionError("manifest plan digest does not match its plan")
        return cls(
            plan=plan,
            trials=[Trial.from_dict(t) for t in d.get("trials", [])],
            tuned=d.get("tuned", {}),
            tuning_reports=d.get("tuning_reports", []),
            designs=d.get("designs", {}),
            schema_version=d["schema_version"],
            software_version=d.get("software_version", ""),
            created=d.get("created", ""),
            updated=d.get("updated", ""),
        )


def _group_order(key):
    algorithm, size = key
    return (ALGORITHMS.index(algorithm), size)


def _trial_order(t: Trial):
    return (ALGORITHMS.index(t.record.algorithm), t.record.n, PHASES.index(t.phase), t.config_id, t.replication)


def results_csv(trials: Sequence[Trial]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for t in sorted(trials, key=_trial_order):
        writer.writerow(t.csv_row())
    return buf.getvalue()


def tuning_csv(reports: Sequence[dict]) -> str:
    """One row per tuning candidate with its aggregates and TOPSIS closeness."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["algorithm", "n", "config_id", "params", "mean_cost", "mean_nfe", "closeness", "chosen"])
    for report in reports:
        for c in report["candidates"]:
            params = ";".join(f"{k}={v}" for k, v in c["config"].items() if k != "algorithm")
            writer.writerow([report["algorithm"], report["size"], c["config_id"], params, repr(c["mean_cost"]),
                             repr(c["mean_nfe"]), repr(c["closeness"]), int(c["config_id"] == report["chosen_config_id"])])
    return buf.getvalue()


def write_results(manifest: RunManifest, path: str | os.PathLike) -> Path:
    """Write ``manifest.json``, ``results.csv`` and ``tuning.csv`` into directory ``path``."""
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    manifest.updated = _now()
    (out / MANIFEST_NAME).write_text(json.dumps(manifest.to_dict(), indent=1) + "\n", encoding="utf-8")
    with open(out / RESULTS_NAME, "w", encoding="utf-8", newline="") as fh:
        fh.write(results_csv(manifest.trials))
    with open(out / TUNING_NAME, "w", encoding="utf-8", newline="") as fh:
        fh.write(tuning_csv(manifest.tuning_reports))
    return out


def read_results(path: str | os.PathLike) -> RunManifest:
    """Load a results directory; checks that the CSV agrees with the manifest."""
    out = Path(path)
    manifest = RunManifest.from_dict(json.loads((out / MANIFEST_NAME).read_text(encoding="utf-8")))
    csv_path = out / RESULTS_NAME
    if csv_path.exists():
        with open(csv_path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
        if rows and rows[0] != CSV_HEADER:
            raise SchemaVersionError(f"unexpected results header {rows[0]}")
        expected = list(csv.reader(io.StringIO(results_csv(manifest.trials))))
        strip = CSV_HEADER.index("elapsed_ms")
        if [r[:strip] + r[strip + 1:] for r in rows] != [r[:strip] + r[strip + 1:] for r in expected]:
            raise ValueError(f"{csv_path} disagrees with {MANIFEST_NAME}")
    return manifest


def replay(manifest: RunManifest, trials: Sequence[Trial] | None = None) -> list[str]:
    """Re-run stored trials; return a description of every mismatch."""
    problems = []
    for t in manifest.trials if trials is None else trials:
        again = _execute((t.record.n, t.config, t.record.seed, manifest.plan.nfe_cap))
        if (again.cost, again.nfe) != (t.record.cost, t.record.nfe) or not np.array_equal(again.best, t.record.best):
            problems.append(
                f"{t.record.algorithm} n={t.record.n} {t.phase} cfg={t.config_id} rep={t.replication}: "
                f"stored cost/nfe {t.record.cost}/{t.record.nfe}, replay {again.cost}/{again.nfe}"
            )
    return problems


def tune(plan: ExperimentPlan, manifest: RunManifest, algorithm: str, size: int, executor: Executor | None = None) -> TuningOutcome:
    outcome = run_tuning_phase(plan, algorithm, size, executor)
    grid = plan.grid(algorithm)
    manifest.designs[algorithm] = {"factors": grid.names, **build_design(grid).to_dict()}
    manifest.replace_trials(algorithm, size, ["tuning"], outcome.trials)
    manifest.set_tuned(algorithm, size, outcome.config, outcome.config_id)
    manifest.tuning_reports = [
        r for r in manifest.tuning_reports if (r["algorithm"], r["size"]) != (algorithm, size)
    ] + [outcome.report()]
    manifest.tuning_reports.sort(key=lambda r: _group_order((r["algorithm"], r["size"])))
    return outcome


def evaluate(plan: ExperimentPlan, manifest: RunManifest, algorithm: str, size: int, executor: Executor | None = None) -> list[SummaryRow]:
    """Validation then final phase for a tuned (algorithm, size)."""
    tuned = manifest.tuned_for(algorithm, size)
    if tuned is None:
        raise LookupError(f"no tuned configuration for {algorithm} at n={size}; run `tune` first")
    config_id, config = tuned
    validation, v_trials = run_validation_phase(plan, algorithm, size, config, config_id, executor)
    final, f_trials = run_final_phase(plan, algorithm, size, config, config_id, executor)
    manifest.replace_trials(algorithm, size, ["validation", "final"], v_trials + f_trials)
    return validation + final


def use_published_configs(manifest: RunManifest, algorithm: str, size: int) -> AlgorithmConfig:
    """Store the published tuned configuration instead of running the tuning phase."""
    config = tuned_config(algorithm, size)
    manifest.set_tuned(algorithm, size, config, -1, source="published")
    return config


def run_protocol(plan: ExperimentPlan, workers: int = 1, manifest: RunManifest | None = None) -> RunManifest:
    """Full tune -> validate -> final protocol for every (algorithm, size) in the plan."""
    manifest = manifest or RunManifest(plan)
    with Executor(workers) as executor:
        for algorithm in plan.algorithms:
            for size in plan.sizes:
                tune(plan, manifest, algorithm, size, executor)
                evaluate(plan, manifest, algorithm, size, executor)
    return manifest


# -- reports -----------------------------------------------------------------

def _compact(value: float) -> str:
    if value >= 1000:
        return f"{value / 1000:.1f}K"
    return f"{value:g}"


def _fmt(value: float) -> str:
    return f"{value:g}" if float(value).is_integer() else f"{value:.1f}"


@dataclass
class Report:
    grid_csv: str
    grid_text: str
    tables_csv: str
    tables_text: str

    @property
    def text(self) -> str:
        return self.grid_text + "\n" + self.tables_text


def render_report(summaries: Sequence[SummaryRow], sizes: Sequence[int] | None = None) -> Report:
    """Comparison grid (min cost / min NFE per algorithm and size) plus per-size tables."""
    by_key = {(s.algorithm, s.size, s.metric): s for s in summaries}
    algorithms = sorted({s.algorithm for s in summaries}, key=ALGORITHMS.index)
    all_sizes = sorted({s.size for s in summaries})
    sizes = all_sizes if sizes is None else [s for s in sizes]

    grid = io.StringIO()
    w = csv.writer(grid, lineterminator="\n")
    w.writerow(["algorithm", "metric", *sizes])
    text_rows = [["Algorithm", "Metric", *map(str, sizes)]]
    for algorithm in algorithms:
        for metric, label in (("cost", "Min Cost"), ("nfe", "Min NFE")):
            cells, shown = [], []
            for size in sizes:
                row = by_key.get((algorithm, size, metric))
                if row is None:
                    log.warning("no %s summary for %s at n=%d", metric, algorithm, size)
                    cells.append("")
                    shown.append("")
                else:
                    cells.append(_fmt(row.min))
                    shown.append(_fmt(row.min) if metric == "cost" else _compact(row.min))
            w.writerow([algorithm, metric, *cells])
            text_rows.append([algorithm.upper() if metric == "cost" else "", label, *shown])

    tables = io.StringIO()
    tw = csv.writer(tables, lineterminator="\n")
    tw.writerow(["n", "algorithm", "metric", "min", "avg", "max", "count"])
    blocks = []
    for size in all_sizes:
        rows = [["Algorithm", "Metric", "Min", "AVG", "MAX"]]
        for algorithm in algorithms:
            for metric, label in (("cost", "Cost"), ("nfe", "NFE")):
                s = by_key.get((algorithm, size, metric))
                if s is None:
                    continue
                tw.writerow([size, algorithm, metric, _fmt(s.min), repr(float(s.avg)), _fmt(s.max), s.count])
                rows.append([algorithm.upper() if metric == "cost" else "", label, _fmt(s.min), _fmt(s.avg), _fmt(s.max)])
        blocks.append(f"Execution results for {size}-Queens\n" + _align(rows))
    return Report(grid.getvalue(), _align(text_rows), tables.getvalue(), "\n".join(blocks))


def _align(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for j, row in enumerate(rows):
        lines.append("  ".join(c.ljust(wd) if i < 2 else c.rjust(wd) for i, (c, wd) in enumerate(zip(row, widths))).rstrip())
        if j == 0:
            lines.append("  ".join("-" * wd for wd in widths))
    return "\n".join(lines) + "\n"
