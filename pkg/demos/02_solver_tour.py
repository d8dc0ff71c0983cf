"""
Seven solvers on the same boards
================================

Every solver takes ``(n, config, seed)`` and returns a RunRecord. The
configurations below are the published tuned values for each board size.
"""

# %%
import warnings

import numpy as np

from nqueens_bench.config import ALGORITHMS, OutOfGridWarning, tuned_config
from nqueens_bench.solvers import solve

warnings.simplefilter("ignore", OutOfGridWarning)

SEEDS = range(5)

for n in (8, 25):
    print(f"\n{n}-queens, {len(SEEDS)} seeds")
    print(f"{'solver':7} {'min':>4} {'mean':>6} {'mean NFE':>9}")
    for algorithm in ALGORITHMS:
        runs = [solve(n, tuned_config(algorithm, n), seed) for seed in SEEDS]
        costs = [r.cost for r in runs]
        nfe = np.mean([r.nfe for r in runs])
        print(f"{algorithm:7} {min(costs):4d} {np.mean(costs):6.1f} {nfe:9.0f}")

# %%
# An observer sees every iteration. For brain drain optimisation the extras
# include the agents that changed country in that iteration.
trace = []
record = solve(25, tuned_config("brado", 25), seed=3, observer=trace.append)
emigrations = sum(kind == "emigrate" for info in trace for *_, kind in info.extra["moves"])
returns = sum(kind == "return" for info in trace for *_, kind in info.extra["moves"])
print(f"\nbrado: cost {record.cost} after {record.iterations} iterations and {record.nfe} evaluations")
print(f"{emigrations} emigrations, {returns} returns")

# best-so-far never increases
best = [info.best_cost for info in trace]
print("best cost every 20 iterations:", best[::20])

# %%
# Same seed, same run.
a = solve(25, tuned_config("ga", 25), seed=11)
b = solve(25, tuned_config("ga", 25), seed=11)
print("\nreproducible:", a == b)
