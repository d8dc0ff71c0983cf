"""Generational GA with elitist survival, binary tournaments and one-point crossover."""
from __future__ import annotations

import math

import numpy as np

from ..config import GAConfig
from ..problem import UNIFORM_COLUMNS, random_placement
from .base import Run, StopState


def _tournament(costs: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.integers(0, len(costs), size=count)
    b = rng.integers(0, len(costs), size=count)
    # ties go to the first contestant
    return np.where(costs[b] < costs[a], b, a)


def run_ga(run: Run, config: GAConfig) -> None:
    n, rng = run.n, run.rng
    size = config.pop_size
    pop = np.stack([random_placement(n, UNIFORM_COLUMNS, rng) for _ in range(size)])
    costs = run.evaluate(pop)
    run.consider_batch(pop, costs)

    n_elite = min(size - 1, math.ceil(config.survival_rate * size))
    n_children = size - n_elite
    stop = StopState(max_stall=config.max_stall, nfe_cap=run.nfe_cap)
    stop.reset(run.best_cost)
    while not stop.should_stop(run.nfe):
        order = np.argsort(costs, kind="stable")
        elite, elite_costs = pop[order[:n_elite]], costs[order[:n_elite]]

        first = pop[_tournament(costs, n_children, rng)]
        second = pop[_tournament(costs, n_children, rng)]
        children = first.copy()
        if n > 1:
            crossing = rng.random(n_children) < config.crossover_prob
            cuts = rng.integers(1, n, size=n_children)
            tail = np.arange(n)[None, :] >= cuts[:, None]
            swap = crossing[:, None] & tail
            children[swap] = second[swap]
        mutate = rng.random((n_children, n)) < 1.0 / n
        children[mutate] = rng.integers(0, n, size=int(mutate.sum()))

        child_costs = run.evaluate(children)
        run.consider_batch(children, child_costs)
        pop = np.concatenate([elite, children])
        costs = np.concatenate([elite_costs, child_costs])
        stop.offer(run.best_cost)
        run.tick(stop, len(pop), n_elite=n_elite)
