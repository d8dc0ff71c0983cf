"""Brain drain optimisation adapted to the discrete queen placement.

The population is split into countries that sit on the vertices of a
connected Erdos-Renyi graph. Every iteration each agent ("brain") goes
through two moves, each evaluated and kept when no worse than the current
placement:

1. attraction: every row is copied from the best agent of its country with
   probability ``wg`` (skipped, and not evaluated, when nothing changes);
2. local move: one row is given a fresh random column. With probability
   ``d`` that row is drawn from the rows the brain still shares with the
   country's worst agent (moving away from the worst), otherwise from all rows.

A brain that has not strictly improved for ``alpha`` iterations emigrates to
the adjacent country with the lowest mean cost; on the following iteration it
goes back to its origin with probability ``p_return``.
"""
from __future__ import annotations

import warnings

import numpy as np

from ..config import BradoConfig
from ..problem import UNIFORM_COLUMNS, random_placement
from .base import Run, StopState


def country_graph(k: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Boolean adjacency of a G(k, p) graph, redrawn until it is connected."""
    if k == 1:
        return np.zeros((1, 1), dtype=bool)
    iu = np.triu_indices(k, 1)
    while True:
        adj = np.zeros((k, k), dtype=bool)
        adj[iu] = rng.random(len(iu[0])) < p
        adj |= adj.T
        if _connected(adj):
            return adj


def _connected(adj: np.ndarray) -> bool:
    seen = np.zeros(len(adj), dtype=bool)
    seen[0] = True
    frontier = [0]
    while frontier:
        v = frontier.pop()
        for w in np.flatnonzero(adj[v] & ~seen):
            seen[w] = True
            frontier.append(int(w))
    return bool(seen.all())


def _country_extremes(country: np.ndarray, costs: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Index of the best and worst agent per country (-1 for an empty country)."""
    best = np.full(k, -1)
    worst = np.full(k, -1)
    for c in range(k):
        members = np.flatnonzero(country == c)
        if len(members):
            best[c] = members[np.argmin(costs[members])]
            worst[c] = members[np.argmax(costs[members])]
    return best, worst


def _repulsion_rows(cand: np.ndarray, worst: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """For each candidate, a random row where it matches ``worst``; -1 if none."""
    shared = cand == worst
    keys = np.where(shared, rng.random(shared.shape), -1.0)
    rows = np.argmax(keys, axis=1)
    rows[~shared.any(axis=1)] = -1
    return rows


def _accept(run: Run, x: np.ndarray, costs: np.ndarray, cand: np.ndarray, who: np.ndarray):
    """Evaluate candidates for agents ``who``; keep those no worse than now."""
    cand_costs = run.evaluate(cand)
    run.consider_batch(cand, cand_costs)
    improved = cand_costs < costs[who]
    keep = cand_costs <= costs[who]
    x[who[keep]] = cand[keep]
    costs = costs.copy()
    costs[who[keep]] = cand_costs[keep]
    return improved, costs


def run_brado(run: Run, config: BradoConfig) -> None:
    n, rng = run.n, run.rng
    size, k = config.p0, config.n_countries
    if k == 1:
        warnings.warn("brado with a single country: migration disabled", RuntimeWarning, stacklevel=3)
    adj = country_graph(k, config.p_er, rng)
    agents = np.arange(size)

    x = np.stack([random_placement(n, UNIFORM_COLUMNS, rng) for _ in range(size)])
    costs = run.evaluate(x)
    run.consider_batch(x, costs)
    country = agents % k
    origin = np.full(size, -1)
    stagnation = np.zeros(size, dtype=np.int64)

    stop = StopState(max_stall=config.max_stall, nfe_cap=run.nfe_cap)
    stop.reset(run.best_cost)
    while not stop.should_stop(run.nfe):
        best_of, worst_of = _country_extremes(country, costs, k)
        leader = x[best_of[country]]
        worst = x[worst_of[country]]

        improved = np.zeros(size, dtype=bool)
        cand = np.where(rng.random((size, n)) < config.wg, leader, x)
        moved = np.flatnonzero(np.any(cand != x, axis=1))
        if len(moved):
            improved[moved], costs = _accept(run, x, costs, cand[moved], moved)

        if run.best_cost > 0:
            cand = x.copy()
            rows = rng.integers(0, n, size=size)
            repel = _repulsion_rows(cand, worst, rng)
            use_repel = (rng.random(size) < config.d) & (repel >= 0) & (worst_of[country] != agents)
            rows[use_repel] = repel[use_repel]
            cand[agents, rows] = rng.integers(0, n, size=size)
            better, costs = _accept(run, x, costs, cand, agents)
            improved |= better
        stagnation = np.where(improved, 0, stagnation + 1)

        returning = (origin >= 0) & (rng.random(size) < config.p_return)
        moves = [(int(i), int(country[i]), int(origin[i]), "return") for i in np.flatnonzero(returning)]
        country[returning] = origin[returning]
        origin[:] = -1

        if k > 1:
            counts = np.bincount(country, minlength=k)
            sums = np.bincount(country, weights=costs, minlength=k)
            means = np.where(counts > 0, sums / np.maximum(counts, 1), np.inf)
            for i in np.flatnonzero(stagnation >= config.alpha):
                here = country[i]
                neighbours = np.flatnonzero(adj[here])
                target = neighbours[np.argmin(means[neighbours])]
                moves.append((int(i), int(here), int(target), "emigrate"))
                origin[i] = here
                country[i] = target
                stagnation[i] = 0

        stop.offer(run.best_cost)
        run.tick(stop, size, moves=moves, adjacency=adj)
