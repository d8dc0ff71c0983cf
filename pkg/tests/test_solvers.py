import numpy as np
import pytest

from invariants import check_run, random_config, traced_solve
from nqueens_bench.config import ALGORITHMS, BradoConfig, ILSConfig, LSConfig, MLSConfig, tuned_config
from nqueens_bench.problem import evaluate_cost
from nqueens_bench.solvers import StopState, make_rng, solve
from nqueens_bench.solvers.brado import country_graph
from nqueens_bench.solvers.ica import _colony_counts, _normalized_power

pytestmark = pytest.mark.filterwarnings("ignore::nqueens_bench.config.OutOfGridWarning")


def small_config(algorithm):
    """Cheap grid point for quick structural tests."""
    return {
        "brado": BradoConfig(p0=30, max_stall=30),
        "ga": tuned_config("ga", 8),
        "ica": tuned_config("ica", 8),
        "ils": ILSConfig(max_stall=30, n_restarts=5),
        "ls": LSConfig(),
        "mls": MLSConfig(max_stall=30, n_restarts=5),
        "pso": tuned_config("pso", 8),
    }[algorithm]


@pytest.mark.parametrize("algorithm", ALGORITHMS)
@pytest.mark.parametrize("seed", range(6))
def test_invariants_on_random_configs(algorithm, seed):
    rng = np.random.default_rng([seed, ALGORITHMS.index(algorithm)])
    config = random_config(algorithm, rng)
    n = int(rng.integers(4, 13))
    trace = traced_solve(n, config, seed)
    problems = {k: v for k, v in check_run(trace, config).items() if v}
    assert not problems, problems


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_invariants_with_binding_nfe_cap(algorithm):
    config = small_config(algorithm)
    trace = traced_solve(30, config, 5, nfe_cap=200)
    assert not any(check_run(trace, config, nfe_cap=200).values())
    r = trace.record
    assert r.nfe >= 200 or r.cost == 0
    assert r.capped == (r.cost > 0)


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_deterministic_for_a_seed(algorithm):
    config = small_config(algorithm)
    a = solve(12, config, 42)
    b = solve(12, config, 42)
    assert a == b
    assert a.cost == evaluate_cost(a.best)


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_seeds_give_different_runs(algorithm):
    config = small_config(algorithm)
    runs = {(solve(20, config, s).nfe, tuple(solve(20, config, s).best)) for s in range(4)}
    assert len(runs) > 1


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_single_queen(algorithm):
    r = solve(1, small_config(algorithm), 0)
    assert r.cost == 0 and r.best.tolist() == [0]
    assert r.nfe >= 1


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_two_queens_reaches_the_global_minimum(algorithm):
    # the best 2-queens placement still costs 1 (two queens in one column)
    costs = [solve(2, small_config(algorithm), s).cost for s in range(5)]
    assert min(costs) == 1


def test_ls_two_queens_published_config():
    assert solve(2, LSConfig(max_stall=150, radius=0.8), 0).cost == 1


@pytest.mark.parametrize("n", [0, -3, 2.5])
def test_bad_board_size(n):
    with pytest.raises(ValueError):
        solve(n, LSConfig(), 0)


def test_invalid_config_is_rejected_before_running():
    with pytest.raises(ValueError):
        solve(8, LSConfig(radius=0.0), 0)
    with pytest.raises(ValueError):
        solve(8, LSConfig(), 0, nfe_cap=0)


def test_cost_zero_stops_immediately():
    seen = []
    r = solve(8, BradoConfig(), 0, observer=seen.append)
    assert r.cost == 0
    assert [i.best_cost for i in seen].count(0) == 1


def test_single_country_brado_warns_and_runs():
    with pytest.warns(RuntimeWarning, match="single country"):
        r = solve(8, BradoConfig(n_countries=1, p0=30, max_stall=20), 3)
    assert r.cost == evaluate_cost(r.best)


@pytest.mark.parametrize("k, p", [(2, 0.1), (5, 0.3), (8, 0.9)])
def test_country_graph_connected(k, p):
    rng = make_rng(1)
    for _ in range(20):
        adj = country_graph(k, p, rng)
        assert np.array_equal(adj, adj.T) and not adj.diagonal().any()
        reach = np.eye(k, dtype=bool)
        for _ in range(k):
            reach = reach | (reach.astype(int) @ adj.astype(int) > 0)
        assert reach.all()


def test_colony_counts_sum():
    for power in ([0.5, 0.3, 0.2], [1.0, 0.0], [0.25] * 4, [0.34, 0.33, 0.33]):
        counts = _colony_counts(np.array(power), 17)
        assert counts.sum() == 17 and (counts >= 0).all()
    np.testing.assert_allclose(_normalized_power(np.array([3.0, 3.0])), [0.5, 0.5])


def test_stop_state():
    stop = StopState(max_stall=2, nfe_cap=10)
    stop.reset(5)
    assert stop.offer(5) is False and stop.stall == 1
    assert stop.offer(4) is True and stop.stall == 0
    stop.offer(4)
    stop.offer(4)
    assert stop.should_stop(0)
    assert StopState(max_stall=5, nfe_cap=10, best=3).should_stop(10)
    assert StopState(max_stall=5, best=0).should_stop(0)


def test_ls_effort_is_small_at_large_n():
    r = solve(1000, tuned_config("ls", 1000), 0)
    assert r.nfe < 5000


@pytest.mark.parametrize("algorithm, bound", [("brado", 0), ("ga", 0), ("ica", 0), ("mls", 0), ("pso", 1), ("ils", 3)])
def test_eight_queens_with_published_configs(algorithm, bound):
    costs = [solve(8, tuned_config(algorithm, 8), seed).cost for seed in range(10)]
    assert min(costs) <= bound
