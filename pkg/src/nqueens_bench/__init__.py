"""Metaheuristic benchmark on the N-Queens problem.

Seven solvers (brain drain optimisation, GA, ICA, PSO and three local
searches) share one clash-count objective, are tuned on orthogonal-array
designs ranked with TOPSIS, and are compared by final cost and number of
function evaluations.
"""

__version__ = "0.1.0"

from .problem import evaluate_cost, evaluate_costs, is_solution, random_placement  # noqa: E402
from .config import ALGORITHMS, make_config, tuned_config  # noqa: E402
from .solvers import solve  # noqa: E402

__all__ = [
    "ALGORITHMS",
    "evaluate_cost",
    "evaluate_costs",
    "is_solution",
    "make_config",
    "random_placement",
    "solve",
    "tuned_config",
]
