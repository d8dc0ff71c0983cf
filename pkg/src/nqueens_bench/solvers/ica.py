"""Imperialist competitive algorithm on the relaxed board ``[0, n-1]^n``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..config import ICAConfig
from ..problem import decode_continuous
from .base import Run, StopState


@dataclass
class Empire:
    imperialist: int
    colonies: list[int] = field(default_factory=list)


def _normalized_power(values: np.ndarray) -> np.ndarray:
    """Roulette weights for a cost vector (lower cost -> larger share)."""
    shifted = values.max() - values
    total = shifted.sum()
    if total <= 0:
        return np.full(len(values), 1.0 / len(values))
    return shifted / total


def _colony_counts(power: np.ndarray, n_colonies: int) -> np.ndarray:
    counts = np.floor(power * n_colonies + 0.5).astype(int)
    # push the rounding surplus/deficit onto the strongest empires
    order = np.argsort(-power, kind="stable")
    i = 0
    while counts.sum() > n_colonies:
        j = order[len(order) - 1 - (i % len(order))]
        if counts[j] > 0:
            counts[j] -= 1
        i += 1
    i = 0
    while counts.sum() < n_colonies:
        counts[order[i % len(order)]] += 1
        i += 1
    return counts


def _total_cost(empire: Empire, costs: np.ndarray, zeta: float) -> float:
    total = float(costs[empire.imperialist])
    if empire.colonies:
        total += zeta * float(costs[empire.colonies].mean())
    return total


def run_ica(run: Run, config: ICAConfig) -> None:
    n, rng = run.n, run.rng
    size = config.pop_size
    hi = float(n - 1)
    unite_dist = config.uniting_threshold * hi * np.sqrt(n)
    n_revolve = min(n, max(1, int(np.floor(config.revolution_rate * n + 0.5))))

    x = rng.uniform(0.0, hi, size=(size, n))
    decoded = decode_continuous(x, n)
    costs = run.evaluate(decoded)
    run.consider_batch(decoded, costs)

    order = np.argsort(costs, kind="stable")
    imps = order[: config.n_imperialists]
    colonies = rng.permutation(order[config.n_imperialists:])
    counts = _colony_counts(_normalized_power(costs[imps].astype(float)), len(colonies))
    empires, start = [], 0
    for imp, count in zip(imps, counts):
        empires.append(Empire(int(imp), [int(c) for c in colonies[start:start + count]]))
        start += count

    stop = StopState(max_stall=config.max_stall, nfe_cap=run.nfe_cap)
    stop.reset(run.best_cost)
    while not stop.should_stop(run.nfe):
        leader = np.arange(size)
        for emp in empires:
            leader[emp.colonies] = emp.imperialist
        col = np.flatnonzero(leader != np.arange(size))

        if len(col):
            pull = rng.random((len(col), n)) * config.assimilation_coeff
            x[col] += pull * (x[leader[col]] - x[col])
            revolt = col[rng.random(len(col)) < config.revolution_rate]
            for i in revolt:
                dims = rng.choice(n, size=n_revolve, replace=False)
                x[i, dims] = rng.uniform(0.0, hi, size=n_revolve)
            np.clip(x, 0.0, hi, out=x)
            decoded = decode_continuous(x[col], n)
            col_costs = run.evaluate(decoded)
            costs[col] = col_costs
            run.consider_batch(decoded, col_costs)

        for emp in empires:
            if emp.colonies:
                best = min(emp.colonies, key=lambda i: (costs[i], i))
                if costs[best] < costs[emp.imperialist]:
                    emp.colonies.remove(best)
                    emp.colonies.append(emp.imperialist)
                    emp.imperialist = best

        empires = _unite(empires, x, costs, unite_dist)
        if len(empires) > 1:
            _compete(empires, costs, config.zeta, rng)

        stop.offer(run.best_cost)
        run.tick(
            stop,
            sum(1 + len(e.colonies) for e in empires),
            n_empires=len(empires),
        )


def _unite(empires: list[Empire], x: np.ndarray, costs: np.ndarray, dist: float) -> list[Empire]:
    merged = True
    while merged and len(empires) > 1:
        merged = False
        for a in range(len(empires)):
            for b in range(a + 1, len(empires)):
                ea, eb = empires[a], empires[b]
                if np.linalg.norm(x[ea.imperialist] - x[eb.imperialist]) <= dist:
                    keep, drop = (ea, eb) if costs[ea.imperialist] <= costs[eb.imperialist] else (eb, ea)
                    keep.colonies.extend([drop.imperialist, *drop.colonies])
                    empires = [e for e in empires if e is not drop]
                    merged = True
                    break
            if merged:
                break
    return empires


def _compete(empires: list[Empire], costs: np.ndarray, zeta: float, rng: np.random.Generator) -> None:
    totals = np.array([_total_cost(e, costs, zeta) for e in empires])
    weakest = int(np.argmax(totals))
    others = [i for i in range(len(empires)) if i != weakest]
    power = _normalized_power(totals)[others]
    power = power / power.sum() if power.sum() > 0 else np.full(len(others), 1.0 / len(others))
    winner = empires[others[int(rng.choice(len(others), p=power))]]
    loser = empires[weakest]
    if loser.colonies:
        victim = max(loser.colonies, key=lambda i: (costs[i], -i))
        loser.colonies.remove(victim)
        winner.colonies.append(victim)
    if not loser.colonies:
        winner.colonies.append(loser.imperialist)
        empires.remove(loser)
