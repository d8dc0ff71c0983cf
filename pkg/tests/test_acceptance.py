"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also echoed to the terminal when output is captured.
"""
import csv
import dataclasses
import io
import itertools
import json
import time

import numpy as np
import pytest

from invariants import check_run, random_config, traced_solve
from nqueens_bench import harness, tuning
from nqueens_bench.cli import default_plan_text
from nqueens_bench.config import ALGORITHMS, tuned_config
from nqueens_bench.problem import evaluate_costs
from nqueens_bench.tuning import MAXIMIZE, MINIMIZE, DecisionMatrix, topsis_rank
from nqueens_bench.verify import all_placements

pytestmark = pytest.mark.filterwarnings("ignore::nqueens_bench.config.OutOfGridWarning")

COMPARISON_SIZES = (8, 25, 100)


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number:>2}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def default_plan():
    return harness.ExperimentPlan.from_dict(json.loads(default_plan_text()))


@pytest.fixture(scope="module")
def final_runs():
    """Ten final-phase runs per solver and size with the published configurations."""
    plan = default_plan()
    runs, seconds = {}, {}
    for n in COMPARISON_SIZES:
        for algorithm in ALGORITHMS:
            t0 = time.perf_counter()
            _, trials = harness.run_final_phase(plan, algorithm, n, tuned_config(algorithm, n))
            runs[algorithm, n] = [t.record for t in trials]
            seconds[n] = seconds.get(n, 0.0) + time.perf_counter() - t0
    return runs, seconds


def oracle_cost(board):
    """Duplicate term plus two per unordered attacking diagonal pair."""
    n = len(board)
    pairs = sum(abs(board[i] - board[j]) == j - i for i, j in itertools.combinations(range(n), 2))
    return n - len(set(board)) + 2 * pairs


def test_criterion_01_cost_oracle(verdict):
    t0 = time.perf_counter()
    checked, mismatches = 0, 0
    for n in range(1, 7):
        boards = all_placements(n)
        got = evaluate_costs(boards)
        want = np.array([oracle_cost(b) for b in boards.tolist()])
        mismatches += int(np.count_nonzero(got != want))
        checked += len(boards)
    elapsed = time.perf_counter() - t0
    verdict(1, mismatches == 0 and checked == sum(n**n for n in range(1, 7)) and elapsed < 10,
            f"{checked} placements for n=1..6, {mismatches} mismatches, {elapsed:.2f}s")


def test_criterion_02_eight_queens_count(verdict):
    t0 = time.perf_counter()
    perms = np.array(list(itertools.permutations(range(8))))
    zeros = int(np.count_nonzero(evaluate_costs(perms) == 0))
    elapsed = time.perf_counter() - t0
    verdict(2, zeros == 92 and elapsed < 5, f"{zeros} of {len(perms)} permutations cost 0, {elapsed:.2f}s")


def test_criterion_03_design_sizes(verdict):
    expected = {"brado": 32, "ga": 16, "ica": 32, "ils": 32, "ls": 16, "mls": 16, "pso": 16}
    got = {a: tuning.build_design(tuning.FactorGrid.for_algorithm(a)).runs for a in ALGORITHMS}
    verdict(3, got == expected, f"design runs {got}")


def test_criterion_04_orthogonal_arrays(verdict):
    problems = (
        tuning.balance_violations(tuning.L16, (4,) * 5)
        + tuning.strength2_violations(tuning.L16, (4,) * 5)
        + tuning.balance_violations(tuning.L32, tuning.L32_LEVELS)
        + tuning.strength2_violations(tuning.L32, tuning.L32_LEVELS, range(1, 10))
    )
    counts_16 = {int(c) for col in tuning.L16.T for c in np.bincount(col, minlength=4)}
    verdict(4, not problems and counts_16 == {4}, f"L16 and L32: {len(problems)} violations")


def stepwise_topsis(values, weights, directions):
    values = np.asarray(values, dtype=float)
    weights = np.asarray(weights, dtype=float) / np.sum(weights)
    rows, cols = values.shape
    v = np.zeros_like(values)
    for j in range(cols):
        norm = np.sqrt(sum(values[i, j] ** 2 for i in range(rows)))
        for i in range(rows):
            v[i, j] = weights[j] * (values[i, j] / norm if norm > 0 else 0.0)
    closeness = []
    for i in range(rows):
        dp = dm = 0.0
        for j in range(cols):
            col = v[:, j]
            good, bad = (col.max(), col.min()) if directions[j] == MAXIMIZE else (col.min(), col.max())
            dp += (v[i, j] - good) ** 2
            dm += (v[i, j] - bad) ** 2
        dp, dm = np.sqrt(dp), np.sqrt(dm)
        closeness.append(0.5 if dp + dm == 0 else dm / (dp + dm))
    return np.array(closeness)


def test_criterion_05_topsis(verdict):
    errors = []
    fixtures = [
        ([[1, 100], [2, 50]], [0.5, 0.5], (MINIMIZE, MINIMIZE)),
        (np.random.default_rng(5).uniform(1, 1000, (4, 2)), [0.6, 0.4], (MINIMIZE, MINIMIZE)),
    ]
    for values, weights, directions in fixtures:
        got = topsis_rank(DecisionMatrix(values, weights, directions)).closeness
        errors.append(float(np.max(np.abs(got - stepwise_topsis(values, weights, directions)))))
    rng = np.random.default_rng(55)
    dominance_failures = scaling_failures = 0
    for _ in range(1000):
        rows = int(rng.integers(2, 9))
        values = rng.uniform(0.1, 1000, (rows, 2))
        weights = rng.uniform(0.05, 1, 2)
        i, j = rng.choice(rows, 2, replace=False)
        values[j] = values[i] + np.array([rng.uniform(0.1, 50), rng.uniform(0, 50)])
        result = topsis_rank(DecisionMatrix(values, weights, (MINIMIZE, MINIMIZE)))
        dominance_failures += int(result.ranks[i] > result.ranks[j])
        scaled = values * rng.uniform(0.01, 100, 2)
        rescaled = topsis_rank(DecisionMatrix(scaled, weights, (MINIMIZE, MINIMIZE)))
        scaling_failures += int(not np.array_equal(result.order, rescaled.order))
    ok = max(errors) <= 1e-9 and dominance_failures == 0 and scaling_failures == 0
    verdict(5, ok, f"fixture error {max(errors):.1e}; 1000 matrices: {dominance_failures} dominance, "
                   f"{scaling_failures} scaling failures")


def test_criterion_06_solvable_at_eight(verdict, final_runs):
    runs, _ = final_runs
    best = {a: min(r.cost for r in runs[a, 8]) for a in ALGORITHMS}
    ok = all(best[a] == 0 for a in ("brado", "ga", "ica", "mls")) and best["pso"] <= 1
    verdict(6, ok, f"min cost over 10 runs at n=8: {best}")


def test_criterion_07_quality_ordering(verdict, final_runs):
    runs, seconds = final_runs
    details, ok = [], True
    for n in (25, 100):
        mean = {a: float(np.mean([r.cost for r in runs[a, n]])) for a in ALGORITHMS}
        brado_best = all(mean["brado"] < mean[a] for a in ALGORITHMS if a != "brado")
        ls_worst = mean["ls"] > mean["ils"] and mean["ls"] > mean["mls"]
        ok &= brado_best and ls_worst and seconds[n] < 1800
        details.append(f"n={n} ({seconds[n]:.0f}s) " + ", ".join(f"{a} {m:.1f}" for a, m in mean.items()))
    verdict(7, ok, "; ".join(details))


def test_criterion_08_effort_ordering(verdict, final_runs):
    runs, _ = final_runs
    details, ok = [], True
    for n in COMPARISON_SIZES:
        nfe = {a: float(np.mean([r.nfe for r in runs[a, n]])) for a in ALGORITHMS}
        smallest = all(nfe["ls"] < nfe[a] for a in ALGORITHMS if a != "ls")
        ratio = nfe["brado"] / nfe["ls"]
        ok &= smallest and ratio >= 10
        details.append(f"n={n} ls {nfe['ls']:.0f}, next {min(v for a, v in nfe.items() if a != 'ls'):.0f}, "
                       f"brado/ls {ratio:.1f}x")
    verdict(8, ok, "; ".join(details))


def strip_elapsed(text):
    rows = list(csv.reader(io.StringIO(text)))
    col = rows[0].index("elapsed_ms")
    return [r[:col] + r[col + 1:] for r in rows]


def test_criterion_09_determinism(verdict, tmp_path):
    plan = dataclasses.replace(default_plan(), sizes=(8, 10))
    harness.write_results(harness.run_protocol(plan), tmp_path / "first")
    harness.write_results(harness.run_protocol(plan, workers=2), tmp_path / "second")
    first = (tmp_path / "first" / "results.csv").read_text()
    second = (tmp_path / "second" / "results.csv").read_text()
    same_rows = strip_elapsed(first) == strip_elapsed(second)
    same_tuning = (tmp_path / "first" / "tuning.csv").read_bytes() == (tmp_path / "second" / "tuning.csv").read_bytes()
    verdict(9, same_rows and same_tuning,
            f"{len(strip_elapsed(first)) - 1} runs over 7 solvers at n=8,10; identical apart from elapsed: {same_rows}")


def test_criterion_10_invariant_suite(verdict):
    rng = np.random.default_rng(10)
    failures = {}
    for algorithm in ALGORITHMS:
        for _ in range(100):
            config = random_config(algorithm, rng)
            seed = int(rng.integers(2**63))
            trace = traced_solve(10, config, seed)
            for name, problems in check_run(trace, config).items():
                if problems:
                    failures.setdefault(f"{algorithm}: {name}", problems[0])
    verdict(10, not failures, f"700 runs at n=10, failures: {failures or 'none'}")
