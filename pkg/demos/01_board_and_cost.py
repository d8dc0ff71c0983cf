"""
Placements, clash cost and the move primitives
==============================================

Run as a script or cell by cell (``# %%`` markers).
"""

# %%
import numpy as np

from nqueens_bench.problem import (
    UNIFORM_COLUMNS,
    decode_continuous,
    evaluate_cost,
    evaluate_costs,
    perturb,
    perturbation_size,
    random_placement,
)

# entry i is the column of the queen in row i
solution = np.array([0, 4, 7, 5, 2, 6, 1, 3])
print("known 8-queens solution:", solution, "cost", evaluate_cost(solution))


def show(board):
    for col in board:
        print(" ".join("Q" if c == col else "." for c in range(len(board))))


show(solution)

# %%
# Two queens on one column cost 1; a diagonal pair costs 2 because both
# ordered pairs (i, j) and (j, i) are counted.
print(evaluate_cost([0, 0]), evaluate_cost([0, 1]), evaluate_cost([1, 1, 1]))

# %%
# Costs of a whole batch in one call. Random boards are far from solved.
rng = np.random.default_rng(7)
batch = np.stack([random_placement(100, UNIFORM_COLUMNS, rng) for _ in range(1000)])
costs = evaluate_costs(batch)
print(f"random 100-queens boards: mean cost {costs.mean():.1f}, best {costs.min()}")

# %%
# perturb() redraws round(radius * n) distinct rows (at least one).
x = random_placement(20, UNIFORM_COLUMNS, rng)
for radius in (0.05, 0.2, 0.5, 1.0):
    y = perturb(x, radius, rng)
    print(f"radius {radius:4}: {perturbation_size(20, radius):2d} rows drawn, {np.count_nonzero(x != y):2d} changed")

# %%
# Continuous solvers (PSO, ICA) round half away from zero and clamp to the board.
print(decode_continuous([-0.7, 0.5, 1.49, 2.5, 9.0], n=5))
