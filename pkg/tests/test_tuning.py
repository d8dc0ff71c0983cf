import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nqueens_bench.config import ALGORITHMS, GRIDS
from nqueens_bench.tuning import (
    L16,
    L32,
    L32_LEVELS,
    MAXIMIZE,
    MINIMIZE,
    ConfigAggregate,
    DecisionMatrix,
    DesignError,
    Factor,
    FactorGrid,
    UnsupportedProfileError,
    balance_violations,
    build_design,
    decision_matrix,
    expand_design,
    level_indices,
    select_config,
    strength2_violations,
    topsis_rank,
)

TABLE_RUNS = {"brado": 32, "ga": 16, "ica": 32, "ils": 32, "ls": 16, "mls": 16, "pso": 16}


def topsis_by_hand(values, weights, directions):
    """Plain-loop TOPSIS used as the reference."""
    rows, cols = len(values), len(values[0])
    total_w = sum(weights)
    w = [x / total_w for x in weights]
    norm = [math.sqrt(sum(values[i][j] ** 2 for i in range(rows))) for j in range(cols)]
    v = [[(values[i][j] / norm[j] if norm[j] else 0.0) * w[j] for j in range(cols)] for i in range(rows)]
    best, worst = [], []
    for j in range(cols):
        col = [v[i][j] for i in range(rows)]
        hi, lo = max(col), min(col)
        best.append(hi if directions[j] == MAXIMIZE else lo)
        worst.append(lo if directions[j] == MAXIMIZE else hi)
    out = []
    for i in range(rows):
        dp = math.sqrt(sum((v[i][j] - best[j]) ** 2 for j in range(cols)))
        dm = math.sqrt(sum((v[i][j] - worst[j]) ** 2 for j in range(cols)))
        out.append(0.5 if dp + dm == 0 else dm / (dp + dm))
    return out


# -- designs -----------------------------------------------------------------

@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_design_run_counts(algorithm):
    grid = FactorGrid.for_algorithm(algorithm)
    design = build_design(grid)
    assert design.runs == TABLE_RUNS[algorithm]
    configs = expand_design(design, grid)
    assert len({tuple(sorted(c.to_dict().items())) for c in configs}) == design.runs
    for row, config in zip(design.matrix, configs):
        assert level_indices(config, grid) == row.tolist()


@pytest.mark.parametrize("algorithm", ALGORITHMS)
def test_designs_are_balanced_and_pairwise_orthogonal(algorithm):
    grid = FactorGrid.for_algorithm(algorithm)
    design = build_design(grid)
    assert balance_violations(design.matrix, design.levels) == []
    if design.source != "full-factorial":
        # folded two-level factors are only balanced, pure columns are strength 2
        pure = [i for i, c in enumerate(design.levels) if c == 4]
        assert strength2_violations(design.matrix, design.levels, pure) == []


def test_l16_properties():
    assert L16.shape == (16, 5)
    assert balance_violations(L16, (4,) * 5) == []
    assert strength2_violations(L16, (4,) * 5) == []


def test_l32_properties():
    assert L32.shape == (32, 10)
    assert balance_violations(L32, L32_LEVELS) == []
    assert strength2_violations(L32, L32_LEVELS) == []


def test_corrupted_array_is_detected():
    bad = L16.copy()
    bad[0, 2], bad[1, 2] = bad[1, 2], bad[0, 2]
    assert balance_violations(bad, (4,) * 5) == []  # a swap keeps level counts
    assert strength2_violations(bad, (4,) * 5)
    bad[0, 0] = (bad[0, 0] + 1) % 4
    assert balance_violations(bad, (4,) * 5)


def test_full_factorial_for_small_grid():
    grid = FactorGrid("ls", (Factor("max_stall", (30, 70, 100, 150)), Factor("radius", (0.2, 0.5, 0.8, 1.0))))
    design = build_design(grid)
    assert design.source == "full-factorial" and design.runs == 16


def test_single_level_grid_gives_one_config():
    grid = FactorGrid.for_algorithm("ls", {"max_stall": (30,), "radius": (0.5,)})
    design = build_design(grid)
    assert design.runs == 1
    [config] = expand_design(design, grid)
    assert (config.max_stall, config.radius) == (30, 0.5)


def test_unsupported_profile():
    grid = FactorGrid("brado", tuple(Factor(f"f{i}", (1, 2, 3, 4)) for i in range(10)))
    with pytest.raises(UnsupportedProfileError):
        build_design(grid)


def test_factor_level_count_checked():
    with pytest.raises(ValueError):
        Factor("x", (1, 2, 3))
    with pytest.raises(KeyError):
        FactorGrid.for_algorithm("ga", {"nope": (1, 2)})


def test_expand_design_rejects_bad_matrix():
    grid = FactorGrid.for_algorithm("ga")
    design = build_design(grid)
    with pytest.raises(DesignError):
        expand_design(type(design)(design.matrix[:, :3], design.levels[:3], "cut"), grid)
    broken = design.matrix.copy()
    broken[0, 0] = 7
    with pytest.raises(DesignError):
        expand_design(type(design)(broken, design.levels, "broken"), grid)


# -- TOPSIS ------------------------------------------------------------------

def test_two_by_two_hand_example():
    m = DecisionMatrix([[1, 100], [2, 50]], [0.5, 0.5], (MINIMIZE, MINIMIZE))
    result = topsis_rank(m)
    # both alternatives sit at the same distance from ideal and anti-ideal
    np.testing.assert_allclose(result.closeness, [0.5, 0.5], atol=1e-12)
    np.testing.assert_allclose(result.closeness, topsis_by_hand([[1, 100], [2, 50]], [0.5, 0.5], (MINIMIZE, MINIMIZE)), atol=1e-12)
    assert result.order.tolist() == [0, 1]
    assert result.ranks.tolist() == [1, 2]


def test_two_by_two_with_unequal_weights():
    m = DecisionMatrix([[1, 100], [2, 50]], [0.8, 0.2], (MINIMIZE, MINIMIZE))
    result = topsis_rank(m)
    # by hand: both distances are weight-scaled versions of the same offset
    assert result.closeness[0] == pytest.approx(0.8)
    assert result.closeness[1] == pytest.approx(0.2)
    assert result.order.tolist() == [0, 1]


def test_dominating_alternative_has_closeness_one():
    result = topsis_rank(DecisionMatrix([[1, 10], [3, 40]], [0.5, 0.5], (MINIMIZE, MINIMIZE)))
    np.testing.assert_allclose(result.closeness, [1.0, 0.0])


def test_random_four_by_two_matches_hand_oracle():
    rng = np.random.default_rng(2024)
    values = rng.uniform(0, 100, size=(4, 2))
    weights = rng.uniform(0.1, 1, size=2)
    directions = (MINIMIZE, MAXIMIZE)
    got = topsis_rank(DecisionMatrix(values, weights, directions)).closeness
    np.testing.assert_allclose(got, topsis_by_hand(values.tolist(), weights.tolist(), directions), atol=1e-9)


def test_zero_column_and_identical_rows():
    result = topsis_rank(DecisionMatrix([[0, 5], [0, 5], [0, 5]], [0.5, 0.5], (MINIMIZE, MINIMIZE)))
    np.testing.assert_allclose(result.closeness, [0.5, 0.5, 0.5])
    assert result.order.tolist() == [0, 1, 2]


@pytest.mark.parametrize(
    "values, weights, directions",
    [
        ([], [0.5, 0.5], (MINIMIZE, MINIMIZE)),
        ([[1, 2]], [0.5], (MINIMIZE, MINIMIZE)),
        ([[1, 2]], [-1, 2], (MINIMIZE, MINIMIZE)),
        ([[1, 2]], [0, 0], (MINIMIZE, MINIMIZE)),
        ([[1, 2]], [0.5, 0.5], ("min", "up")),
    ],
)
def test_invalid_decision_matrix(values, weights, directions):
    with pytest.raises(ValueError):
        DecisionMatrix(values, weights, directions)


def test_weights_are_normalised():
    m = DecisionMatrix([[1, 2], [2, 1]], [2, 6], (MINIMIZE, MINIMIZE))
    np.testing.assert_allclose(m.weights, [0.25, 0.75])


matrices = st.integers(2, 8).flatmap(
    lambda rows: arrays(np.float64, (rows, 2), elements=st.floats(0.01, 1e4))
)


@settings(max_examples=200)
@given(matrices, st.floats(0.1, 1.0), st.floats(0.01, 1e3), st.sampled_from([0, 1]))
def test_positive_scaling_leaves_ranking_unchanged(values, w0, scale, column):
    weights = np.array([w0, 1 - w0 + 0.01])
    before = topsis_rank(DecisionMatrix(values, weights, (MINIMIZE, MINIMIZE)))
    scaled = values.copy()
    scaled[:, column] *= scale
    after = topsis_rank(DecisionMatrix(scaled, weights, (MINIMIZE, MINIMIZE)))
    np.testing.assert_allclose(before.closeness, after.closeness, atol=1e-9)


@settings(max_examples=200)
@given(matrices, st.integers(0, 7), st.floats(0.0, 1.0), st.floats(0.1, 1.0))
def test_dominating_alternative_never_ranks_below(values, pick, slack, w0):
    i = pick % len(values)
    j = (i + 1) % len(values)
    # make row j weakly worse than row i on both columns and strictly worse on one
    values = values.copy()
    values[j] = values[i] * np.array([1 + slack, 1.0]) + np.array([0.5, 0.0])
    result = topsis_rank(DecisionMatrix(values, [w0, 1.0], (MINIMIZE, MINIMIZE)))
    assert result.ranks[i] < result.ranks[j]
    assert result.closeness[i] >= result.closeness[j]


@settings(max_examples=100)
@given(matrices)
def test_closeness_in_unit_interval_and_order_sorted(values):
    result = topsis_rank(DecisionMatrix(values, [0.5, 0.5], (MINIMIZE, MINIMIZE)))
    assert np.all((result.closeness >= 0) & (result.closeness <= 1))
    ordered = result.closeness[result.order]
    assert np.all(np.diff(ordered) <= 0)
    assert sorted(result.ranks.tolist()) == list(range(1, len(values) + 1))


def test_select_config_picks_rank_one():
    grid = FactorGrid.for_algorithm("ls")
    configs = expand_design(build_design(grid), grid)[:3]
    aggregates = [
        ConfigAggregate(configs[0], 5.0, 100.0),
        ConfigAggregate(configs[1], 1.0, 50.0),
        ConfigAggregate(configs[2], 3.0, 80.0),
    ]
    assert select_config(aggregates) == configs[1]
    assert decision_matrix(aggregates).values.shape == (3, 2)
    with pytest.raises(ValueError):
        select_config([])


def test_select_config_single_candidate():
    grid = FactorGrid.for_algorithm("ls")
    config = expand_design(build_design(grid), grid)[0]
    assert select_config([ConfigAggregate(config, 0.0, 0.0)]) == config


def test_grid_levels_unchanged_by_overrides():
    before = dict(GRIDS["ga"])
    FactorGrid.for_algorithm("ga", {"pop_size": (10, 20)})
    assert GRIDS["ga"] == before
