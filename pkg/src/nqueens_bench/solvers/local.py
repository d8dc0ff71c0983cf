"""Single-solution solvers: local search, iterated local search, memetic local search."""
from __future__ import annotations

import numpy as np

from ..config import ILSConfig, LSConfig, MLSConfig
from ..problem import RANDOM_PERMUTATION, UNIFORM_COLUMNS, perturb, random_placement
from .base import Run, StopState

INIT_METHOD_NAMES = {1: UNIFORM_COLUMNS, 2: RANDOM_PERMUTATION}

# MLS refines with single-row moves; one sampled neighbour per step keeps its
# effort in line with ILS.
NEIGHBOURHOOD_SAMPLES = 1


def _first_improvement(run: Run, start: np.ndarray, start_cost: int, propose, max_stall: int, **extra):
    """Propose-and-accept hill climbing until ``max_stall`` misses in a row."""
    x, cost = start, start_cost
    stop = StopState(max_stall=max_stall, nfe_cap=run.nfe_cap)
    stop.reset(cost)
    while not stop.should_stop(run.nfe):
        candidate = propose(x)
        c = run.evaluate.one(candidate)
        if c < cost:
            x, cost = candidate, c
            run.consider(x, cost)
        stop.offer(cost)
        run.tick(stop, 1, **extra)
    return x, cost


def _reassign_one(x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    out = x.copy()
    out[rng.integers(len(x))] = rng.integers(len(x))
    return out


def _sampled_descent(run: Run, start: np.ndarray, start_cost: int, max_stall: int, **extra):
    """Descent over single-row reassignments, ``NEIGHBOURHOOD_SAMPLES`` per step."""
    n, m = run.n, NEIGHBOURHOOD_SAMPLES
    x, cost = start, start_cost
    stop = StopState(max_stall=max_stall, nfe_cap=run.nfe_cap)
    stop.reset(cost)
    idx = np.arange(m)
    while not stop.should_stop(run.nfe):
        rows = run.rng.integers(0, n, size=m)
        cols = run.rng.integers(0, n, size=m)
        neighbours = np.repeat(x[None, :], m, axis=0)
        neighbours[idx, rows] = cols
        costs = run.evaluate(neighbours)
        i = int(np.argmin(costs))
        if costs[i] < cost:
            x, cost = neighbours[i].copy(), int(costs[i])
            run.consider(x, cost)
        stop.offer(cost)
        run.tick(stop, 1, **extra)
    return x, cost


def run_ls(run: Run, config: LSConfig) -> None:
    x = random_placement(run.n, UNIFORM_COLUMNS, run.rng)
    cost = run.evaluate.one(x)
    run.consider(x, cost)
    _first_improvement(run, x, cost, lambda p: perturb(p, config.radius, run.rng), config.max_stall)


def run_ils(run: Run, config: ILSConfig) -> None:
    """Kick the best placement by ``radius``, then descend with single-row moves."""
    x = random_placement(run.n, INIT_METHOD_NAMES[config.init_method], run.rng)
    run.consider(x, run.evaluate.one(x))
    for restart in range(config.n_restarts):
        if run.best_cost == 0 or run.exhausted:
            break
        start = perturb(run.best, config.radius, run.rng)
        start_cost = run.evaluate.one(start)
        run.consider(start, start_cost)
        _first_improvement(
            run, start, start_cost, lambda p: _reassign_one(p, run.rng), config.max_stall, restart=restart
        )


def run_mls(run: Run, config: MLSConfig) -> None:
    x = random_placement(run.n, UNIFORM_COLUMNS, run.rng)
    run.consider(x, run.evaluate.one(x))
    for restart in range(config.n_restarts):
        if run.best_cost == 0 or run.exhausted:
            break
        start = perturb(run.best, config.radius, run.rng)
        start_cost = run.evaluate.one(start)
        run.consider(start, start_cost)
        _sampled_descent(run, start, start_cost, config.max_stall, restart=restart)
