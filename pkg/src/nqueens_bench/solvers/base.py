"""Machinery shared by every solver: counted evaluation, stopping rule, run record."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from ..problem import evaluate_costs

DEFAULT_NFE_CAP = 1_000_000

CostFunction = Callable[[np.ndarray], np.ndarray]


class Evaluator:
    """Batch cost function with an exact evaluation counter.

    ``cost_fn`` maps a ``(k, n)`` integer array to ``k`` costs; every row
    counts as one function evaluation.
    """

    def __init__(self, cost_fn: CostFunction | None = None):
        self.cost_fn = cost_fn or evaluate_costs
        self.nfe = 0

    def __call__(self, placements: np.ndarray) -> np.ndarray:
        batch = np.atleast_2d(placements)
        costs = np.asarray(self.cost_fn(batch), dtype=np.int64)
        self.nfe += batch.shape[0]
        return costs

    def one(self, placement: np.ndarray) -> int:
        return int(self(placement[None, :])[0])


@dataclass
class IterationInfo:
    """Snapshot handed to an observer after every outer iteration."""

    iteration: int
    best_cost: int
    tracked_cost: int
    stall: int
    nfe: int
    population_size: int
    extra: dict = field(default_factory=dict)


Observer = Callable[[IterationInfo], None]


@dataclass
class StopState:
    """Best-so-far bookkeeping and the three halting conditions.

    ``stall`` counts iterations since the tracked cost last strictly improved.
    """

    max_stall: int
    nfe_cap: int = DEFAULT_NFE_CAP
    best: float = np.inf
    stall: int = 0

    def offer(self, cost: float) -> bool:
        """Record one iteration's cost; return True on strict improvement."""
        if cost < self.best:
            self.best = cost
            self.stall = 0
            return True
        self.stall += 1
        return False

    def reset(self, cost: float) -> None:
        self.best = cost
        self.stall = 0

    def should_stop(self, nfe: int) -> bool:
        return self.best == 0 or self.stall >= self.max_stall or nfe >= self.nfe_cap


@dataclass
class RunRecord:
    algorithm: str
    n: int
    seed: int
    best: np.ndarray
    cost: int
    nfe: int
    iterations: int
    elapsed: float
    capped: bool = False

    def __eq__(self, other):
        if not isinstance(other, RunRecord):
            return NotImplemented
        return (
            self.algorithm == other.algorithm
            and self.n == other.n
            and self.seed == other.seed
            and np.array_equal(self.best, other.best)
            and self.cost == other.cost
            and self.nfe == other.nfe
            and self.iterations == other.iterations
            and self.capped == other.capped
        )


class Run:
    """Per-run context: evaluator, global best, observer and timing."""

    def __init__(
        self,
        algorithm: str,
        n: int,
        seed: int,
        rng: np.random.Generator,
        nfe_cap: int = DEFAULT_NFE_CAP,
        cost_fn: CostFunction | None = None,
        observer: Optional[Observer] = None,
    ):
        self.algorithm = algorithm
        self.n = n
        self.seed = seed
        self.rng = rng
        self.nfe_cap = nfe_cap
        self.evaluate = Evaluator(cost_fn)
        self.observer = observer
        self.best: np.ndarray | None = None
        self.best_cost: float = np.inf
        self.iterations = 0
        self._t0 = time.perf_counter()

    @property
    def nfe(self) -> int:
        return self.evaluate.nfe

    @property
    def exhausted(self) -> bool:
        return self.nfe >= self.nfe_cap

    def consider(self, placement: np.ndarray, cost: int) -> bool:
        """Keep ``placement`` if it strictly beats the global best."""
        if cost < self.best_cost:
            self.best = np.array(placement, dtype=np.int64, copy=True)
            self.best_cost = int(cost)
            return True
        return False

    def consider_batch(self, placements: np.ndarray, costs: np.ndarray) -> bool:
        i = int(np.argmin(costs))
        return self.consider(placements[i], int(costs[i]))

    def tick(self, stop: StopState, population_size: int, **extra) -> None:
        self.iterations += 1
        if self.observer is not None:
            self.observer(
                IterationInfo(
                    iteration=self.iterations,
                    best_cost=int(self.best_cost),
                    tracked_cost=int(stop.best),
                    stall=stop.stall,
                    nfe=self.nfe,
                    population_size=population_size,
                    extra=extra,
                )
            )

    def record(self) -> RunRecord:
        return RunRecord(
            algorithm=self.algorithm,
            n=self.n,
            seed=self.seed,
            best=self.best,
            cost=int(self.best_cost),
            nfe=self.nfe,
            iterations=self.iterations,
            elapsed=time.perf_counter() - self._t0,
            capped=self.exhausted and self.best_cost > 0,
        )
