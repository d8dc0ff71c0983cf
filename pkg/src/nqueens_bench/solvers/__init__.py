"""The seven solvers behind a single :func:`solve` entry point."""
from __future__ import annotations

import numpy as np

from ..config import AlgorithmConfig
from .base import DEFAULT_NFE_CAP, CostFunction, Evaluator, IterationInfo, Observer, Run, RunRecord, StopState
from .brado import run_brado
from .ga import run_ga
from .ica import run_ica
from .local import run_ils, run_ls, run_mls
from .pso import run_pso

SOLVERS = {
    "brado": run_brado,
    "ga": run_ga,
    "ica": run_ica,
    "ils": run_ils,
    "ls": run_ls,
    "mls": run_mls,
    "pso": run_pso,
}


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def solve(
    n: int,
    config: AlgorithmConfig,
    seed: int,
    nfe_cap: int = DEFAULT_NFE_CAP,
    *,
    cost_fn: CostFunction | None = None,
    observer: Observer | None = None,
) -> RunRecord:
    """Run one solver on the ``n``-queens board and return its record.

    The result depends only on ``(n, config, seed, nfe_cap)``. ``cost_fn``
    replaces the batch cost function (used by tests to count calls);
    ``observer`` receives an :class:`IterationInfo` after every iteration.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"board size must be a positive integer, got {n}")
    if nfe_cap < 1:
        raise ValueError("nfe_cap must be positive")
    config.validate()
    run = Run(config.kind, int(n), int(seed), make_rng(seed), nfe_cap, cost_fn, observer)
    SOLVERS[config.kind](run, config)
    return run.record()


__all__ = [
    "DEFAULT_NFE_CAP",
    "Evaluator",
    "IterationInfo",
    "RunRecord",
    "SOLVERS",
    "StopState",
    "make_rng",
    "solve",
]
