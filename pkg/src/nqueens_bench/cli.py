"""Command-line driver: ``tune``, ``run``, ``report`` and ``verify``.

Progress and warnings go to stderr. Tables printed by ``tune`` and
``report`` go to stdout; everything else is written under the output
directory (``--out``, else ``$NQUEENS_BENCH_OUT``, else ``./results``).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from . import harness
from .harness import ExperimentPlan, RunManifest

log = logging.getLogger("nqueens_bench")

OUT_ENV = "NQUEENS_BENCH_OUT"
DEFAULT_OUT = "results"


class CliError(Exception):
    pass


@dataclass
class CliConfig:
    command: str
    plan: ExperimentPlan
    out: Path
    workers: int
    algorithms: tuple[str, ...]
    sizes: tuple[int, ...]
    published: bool = False


def default_plan_text() -> str:
    return resources.files("nqueens_bench").joinpath("plans/default.json").read_text(encoding="utf-8")


def _csv_list(text: str | None, cast=str) -> tuple | None:
    if text is None:
        return None
    items = [t.strip() for t in text.split(",") if t.strip()]
    try:
        return tuple(cast(t) for t in items)
    except ValueError as exc:
        raise CliError(f"cannot parse list {text!r}: {exc}") from exc


def _load_plan(args) -> ExperimentPlan:
    try:
        data = json.loads(Path(args.plan).read_text(encoding="utf-8") if args.plan else default_plan_text())
        plan = ExperimentPlan.from_dict(data)
        if args.seed is not None:
            plan = replace(plan, master_seed=args.seed)
        if args.weights is not None:
            plan = replace(plan, weights=_csv_list(args.weights, float))
        return plan
    except (OSError, ValueError, TypeError) as exc:
        raise CliError(f"cannot load plan: {exc}") from exc


def _filters(args, plan: ExperimentPlan) -> tuple[tuple[str, ...], tuple[int, ...]]:
    algorithms = _csv_list(args.algorithms) if args.algorithms is not None else plan.algorithms
    sizes = _csv_list(args.sizes, int) if args.sizes is not None else plan.sizes
    extra_a = set(algorithms) - set(plan.algorithms)
    extra_s = set(sizes) - set(plan.sizes)
    if extra_a or extra_s:
        raise CliError(f"filters must be subsets of the plan: unknown algorithms {sorted(extra_a)}, sizes {sorted(extra_s)}")
    # keep plan order
    return tuple(a for a in plan.algorithms if a in algorithms), tuple(s for s in plan.sizes if s in sizes)


def build_config(args) -> CliConfig:
    out = Path(args.out or os.environ.get(OUT_ENV) or DEFAULT_OUT)
    plan = _load_plan(args) if args.command in ("tune", "run") else ExperimentPlan()
    algorithms, sizes = _filters(args, plan) if args.command in ("tune", "run") else ((), ())
    return CliConfig(args.command, plan, out, args.workers, algorithms, sizes, getattr(args, "published", False))


def _open_manifest(cfg: CliConfig, must_exist: bool) -> RunManifest:
    if (cfg.out / harness.MANIFEST_NAME).exists():
        manifest = harness.read_results(cfg.out)
        if manifest.plan.digest() != cfg.plan.digest():
            raise CliError(
                f"{cfg.out} holds results for a different plan (digest {manifest.plan.digest()}, "
                f"current {cfg.plan.digest()}); choose another --out"
            )
        return manifest
    if must_exist:
        raise CliError(f"no tuned configurations in {cfg.out}; run `tune` first")
    return RunManifest(cfg.plan)


def format_tuned(algorithm: str, size: int, params: dict) -> str:
    rows = [(k, str(v)) for k, v in params.items() if k != "algorithm"]
    width = max(len(k) for k, _ in rows)
    lines = [f"Tuned parameters of {algorithm.upper()} for {size}-Queens"]
    lines += [f"  {k.ljust(width)}  {v}" for k, v in rows]
    return "\n".join(lines)


def cmd_tune(cfg: CliConfig) -> int:
    if not cfg.algorithms or not cfg.sizes:
        log.warning("empty algorithm/size filter: nothing to tune")
        return 0
    manifest = _open_manifest(cfg, must_exist=False)
    with harness.Executor(cfg.workers) as executor:
        for algorithm in cfg.algorithms:
            for size in cfg.sizes:
                if cfg.published:
                    config = harness.use_published_configs(manifest, algorithm, size)
                    log.info("%s n=%d: using published configuration", algorithm, size)
                else:
                    log.info("tuning %s at n=%d", algorithm, size)
                    config = harness.tune(cfg.plan, manifest, algorithm, size, executor).config
                print(format_tuned(algorithm, size, config.to_dict()))
                harness.write_results(manifest, cfg.out)
    return 0


def cmd_run(cfg: CliConfig) -> int:
    if not cfg.algorithms or not cfg.sizes:
        log.warning("empty algorithm/size filter: nothing to run")
        return 0
    manifest = _open_manifest(cfg, must_exist=True)
    missing = [f"{a}/{s}" for a in cfg.algorithms for s in cfg.sizes if manifest.tuned_for(a, s) is None]
    if missing:
        raise CliError(f"no tuned configuration for {', '.join(missing)}; run `tune` first")
    with harness.Executor(cfg.workers) as executor:
        for algorithm in cfg.algorithms:
            for size in cfg.sizes:
                log.info("validation + final runs for %s at n=%d", algorithm, size)
                harness.evaluate(cfg.plan, manifest, algorithm, size, executor)
                harness.write_results(manifest, cfg.out)
    return 0


def cmd_report(cfg: CliConfig) -> int:
    if not cfg.out.is_dir():
        raise CliError(f"results directory {cfg.out} does not exist")
    if (cfg.out / harness.MANIFEST_NAME).exists():
        try:
            summaries = harness.read_results(cfg.out).summaries("final")
        except (OSError, ValueError, KeyError) as exc:
            raise CliError(f"cannot read results in {cfg.out}: {exc}") from exc
    else:
        log.warning("no results in %s", cfg.out)
        summaries = []
    report = harness.render_report(summaries)
    (cfg.out / "report_grid.csv").write_text(report.grid_csv, encoding="utf-8")
    (cfg.out / "report_tables.csv").write_text(report.tables_csv, encoding="utf-8")
    (cfg.out / "report.txt").write_text(report.text, encoding="utf-8")
    sys.stdout.write(report.text)
    return 0


def cmd_verify(cfg: CliConfig) -> int:
    from .verify import run_checks

    checks = run_checks()
    for check in checks:
        print(check.line(), file=sys.stdout if check.ok else sys.stderr)
    failed = [c.name for c in checks if not c.ok]
    if failed:
        log.error("failed checks: %s", ", ".join(failed))
        return 1
    return 0


COMMANDS = {"tune": cmd_tune, "run": cmd_run, "report": cmd_report, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help=f"results directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    common.add_argument("--workers", type=int, default=1, help="parallel solver processes")

    planned = argparse.ArgumentParser(add_help=False)
    planned.add_argument("--plan", help="JSON plan file (default: the bundled plan)")
    planned.add_argument("--seed", type=int, help="override the plan's master seed")
    planned.add_argument("--algorithms", help="comma-separated subset of the plan's algorithms")
    planned.add_argument("--sizes", help="comma-separated subset of the plan's board sizes")
    planned.add_argument("--weights", help="TOPSIS weights for mean cost and mean NFE, e.g. 0.5,0.5")

    parser = argparse.ArgumentParser(prog="nqueens-bench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    tune = sub.add_parser("tune", parents=[common, planned], help="tune parameters on the orthogonal-array designs")
    tune.add_argument("--published", action="store_true", help="store the published tuned values instead of tuning")
    sub.add_parser("run", parents=[common, planned], help="validation and final runs with the tuned parameters")
    sub.add_parser("report", parents=[common], help="render comparison tables from stored results")
    sub.add_parser("verify", parents=[common], help="run the built-in oracle checks")
    return parser


def _configure_logging(verbose: bool) -> None:
    for handler in [h for h in log.handlers if getattr(h, "_cli", False)]:
        log.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    handler._cli = True
    log.addHandler(handler)
    log.setLevel(logging.DEBUG if verbose else logging.INFO)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        cfg = build_config(args)
        return COMMANDS[cfg.command](cfg)
    except (CliError, harness.PhaseError, harness.SchemaVersionError, LookupError) as exc:
        log.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
