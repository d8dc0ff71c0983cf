"""Built-in self checks: cost oracle, orthogonal arrays and TOPSIS fixtures."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import tuning
from .config import ALGORITHMS
from .problem import evaluate_costs

EXPECTED_DESIGN_RUNS = {"brado": 32, "ga": 16, "ica": 32, "ils": 32, "ls": 16, "mls": 16, "pso": 16}


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status}  {self.name}" + (f": {self.detail}" if self.detail else "")


def all_placements(n: int) -> np.ndarray:
    """Every length-``n`` vector over ``0..n-1``, one per row (``n**n`` rows)."""
    return np.array(list(itertools.product(range(n), repeat=n)), dtype=np.int64).reshape(-1, n)


def pairwise_cost(placements: np.ndarray) -> np.ndarray:
    """Reference cost from explicit pair enumeration.

    Duplicate-column term plus twice the number of unordered attacking
    diagonal pairs.
    """
    placements = np.asarray(placements)
    n = placements.shape[1]
    duplicates = np.array([n - len(set(row)) for row in placements.tolist()])
    pairs = np.zeros(len(placements), dtype=np.int64)
    for i, j in itertools.combinations(range(n), 2):
        pairs += np.abs(placements[:, i] - placements[:, j]) == j - i
    return duplicates + 2 * pairs


def check_cost_oracle(max_n: int = 6) -> Check:
    for n in range(1, max_n + 1):
        boards = all_placements(n)
        got, want = evaluate_costs(boards), pairwise_cost(boards)
        if not np.array_equal(got, want):
            bad = int(np.flatnonzero(got != want)[0])
            return Check("cost oracle", False, f"n={n} {boards[bad].tolist()}: {got[bad]} != {want[bad]}")
    return Check("cost oracle", True, f"all placements for n<={max_n}")


def check_eight_queens() -> Check:
    perms = np.array(list(itertools.permutations(range(8))), dtype=np.int64)
    zeros = int(np.count_nonzero(evaluate_costs(perms) == 0))
    return Check("8-queens solution count", zeros == 92, f"{zeros} zero-cost permutations (expect 92)")


def check_orthogonal_arrays() -> list[Check]:
    checks = []
    for name, matrix, levels, cols in (
        ("L16", tuning.L16, (4,) * 5, None),
        ("L32", tuning.L32, tuning.L32_LEVELS, None),
    ):
        for invariant, fn in (("balance", tuning.balance_violations), ("strength-2", tuning.strength2_violations)):
            problems = fn(matrix, levels, cols)
            checks.append(Check(f"{name} {invariant}", not problems, "; ".join(problems[:3])))
    for algorithm in ALGORITHMS:
        grid = tuning.FactorGrid.for_algorithm(algorithm)
        design = tuning.build_design(grid)
        configs = tuning.expand_design(design, grid)
        distinct = len({tuple(sorted(c.to_dict().items())) for c in configs})
        ok = design.runs == EXPECTED_DESIGN_RUNS[algorithm] == distinct
        checks.append(Check(f"{algorithm} design size", ok, f"{design.runs} runs ({design.source}), {distinct} distinct"))
    return checks


def check_topsis() -> list[Check]:
    checks = []
    result = tuning.topsis_rank(tuning.DecisionMatrix([[1, 100], [2, 50]], [0.5, 0.5], ("min", "min")))
    ok = np.allclose(result.closeness, [0.5, 0.5], atol=1e-12) and result.order.tolist() == [0, 1]
    checks.append(Check("topsis symmetric pair", ok, f"closeness {result.closeness.tolist()}"))
    result = tuning.topsis_rank(tuning.DecisionMatrix([[1, 10], [3, 40]], [0.5, 0.5], ("min", "min")))
    ok = np.allclose(result.closeness, [1.0, 0.0], atol=1e-12) and result.order.tolist() == [0, 1]
    checks.append(Check("topsis dominance", ok, f"closeness {result.closeness.tolist()}"))
    result = tuning.topsis_rank(tuning.DecisionMatrix([[3, 3], [3, 3]], [0.5, 0.5], ("min", "min")))
    ok = np.allclose(result.closeness, [0.5, 0.5]) and result.order.tolist() == [0, 1]
    checks.append(Check("topsis degenerate ties", ok, f"closeness {result.closeness.tolist()}"))
    return checks


def run_checks(max_n: int = 6) -> list[Check]:
    return [check_cost_oracle(max_n), check_eight_queens(), *check_orthogonal_arrays(), *check_topsis()]
