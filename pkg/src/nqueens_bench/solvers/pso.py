"""Global-best particle swarm on the relaxed board ``[0, n-1]^n``."""
from __future__ import annotations

import numpy as np

from ..config import PSOConfig
from ..problem import decode_continuous
from .base import Run, StopState

INERTIA = 0.7


def run_pso(run: Run, config: PSOConfig) -> None:
    n, rng = run.n, run.rng
    size = config.pop_size
    hi = float(n - 1)
    vmax = hi / 2.0

    x = rng.uniform(0.0, hi, size=(size, n))
    v = rng.uniform(-vmax, vmax, size=(size, n))
    decoded = decode_continuous(x, n)
    costs = run.evaluate(decoded)
    run.consider_batch(decoded, costs)

    pbest, pbest_cost = x.copy(), costs.copy()
    g = int(np.argmin(pbest_cost))
    stop = StopState(max_stall=config.max_stall, nfe_cap=run.nfe_cap)
    stop.reset(run.best_cost)
    while not stop.should_stop(run.nfe):
        r1 = rng.random((size, n))
        r2 = rng.random((size, n))
        v = INERTIA * v + config.c_cognitive * r1 * (pbest - x) + config.c_social * r2 * (pbest[g] - x)
        np.clip(v, -vmax, vmax, out=v)
        x = np.clip(x + v, 0.0, hi)

        decoded = decode_continuous(x, n)
        costs = run.evaluate(decoded)
        run.consider_batch(decoded, costs)
        better = costs < pbest_cost
        pbest[better] = x[better]
        pbest_cost[better] = costs[better]
        g = int(np.argmin(pbest_cost))

        stop.offer(run.best_cost)
        run.tick(stop, size)
