"""Taguchi-style fractional designs over the parameter grids, and TOPSIS ranking."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .config import GRIDS, AlgorithmConfig, make_config


class UnsupportedProfileError(ValueError):
    """The factor profile does not fit any of the embedded arrays."""


class DesignError(ValueError):
    pass


def _parse(rows: str) -> np.ndarray:
    return np.array([[int(ch) for ch in line.strip()] for line in rows.split()], dtype=np.int64)


# L16(4^5): rows (a, b) over GF(4), columns a, b, a+b, a+2b, a+3b.
L16 = _parse(
    """
    00000 01123 02231 03312 10111 11032 12320 13203
    20222 21301 22013 23130 30333 31210 32102 33021
    """
)

# L32(2^1 4^9): runs are GF(2)^5; column 0 is a linear functional, columns
# 1-9 are pairs of functionals spanning a partial spread of 2-subspaces.
L32 = _parse(
    """
    0000000000 0011113333 0022220123 0033333210 0101321302 0110232031
    0123101221 0132012112 0202023231 0213130102 0220203312 0231310021
    0303302133 0312211200 0321122010 0330031323 1000111111 1011002222
    1022331032 1033222301 1101230213 1110323120 1123010330 1132103003
    1202132320 1213021013 1220312203 1231201130 1303213022 1312300311
    1321033101 1330120232
    """
)
L32_LEVELS = (2,) + (4,) * 9


@dataclass(frozen=True)
class Factor:
    name: str
    levels: tuple

    def __post_init__(self):
        if len(self.levels) not in (1, 2, 4):
            raise ValueError(f"factor {self.name!r} must have 2 or 4 levels (or 1 for a fixed value), got {len(self.levels)}")


@dataclass(frozen=True)
class FactorGrid:
    algorithm: str
    factors: tuple[Factor, ...]

    @classmethod
    def for_algorithm(cls, algorithm: str, overrides: Mapping[str, Sequence] | None = None) -> "FactorGrid":
        grid = dict(GRIDS[algorithm])
        for name, levels in (overrides or {}).items():
            if name not in grid:
                raise KeyError(f"{algorithm} has no parameter {name!r}")
            grid[name] = tuple(levels)
        return cls(algorithm, tuple(Factor(name, tuple(levels)) for name, levels in grid.items()))

    @property
    def names(self) -> list[str]:
        return [f.name for f in self.factors]

    @property
    def level_counts(self) -> list[int]:
        return [len(f.levels) for f in self.factors]

    @property
    def full_size(self) -> int:
        return int(np.prod(self.level_counts))


@dataclass(frozen=True)
class OrthogonalArray:
    """Design matrix of level indices, one column per factor."""

    matrix: np.ndarray
    levels: tuple[int, ...]
    source: str

    @property
    def runs(self) -> int:
        return self.matrix.shape[0]

    def to_dict(self) -> dict:
        return {"source": self.source, "levels": list(self.levels), "matrix": self.matrix.tolist()}


def balance_violations(matrix: np.ndarray, levels: Sequence[int], columns: Sequence[int] | None = None) -> list[str]:
    """Columns in which some level does not appear ``runs / levels`` times."""
    matrix = np.asarray(matrix)
    columns = range(matrix.shape[1]) if columns is None else columns
    bad = []
    for c in columns:
        counts = np.bincount(matrix[:, c], minlength=levels[c])
        if len(counts) != levels[c] or np.any(counts != matrix.shape[0] // levels[c]) or matrix.shape[0] % levels[c]:
            bad.append(f"column {c}: level counts {counts.tolist()}")
    return bad


def strength2_violations(matrix: np.ndarray, levels: Sequence[int], columns: Sequence[int] | None = None) -> list[str]:
    """Column pairs in which the ordered level pairs are not equally frequent."""
    matrix = np.asarray(matrix)
    columns = list(range(matrix.shape[1])) if columns is None else list(columns)
    bad = []
    for a, b in itertools.combinations(columns, 2):
        cells = levels[a] * levels[b]
        counts = np.bincount(matrix[:, a] * levels[b] + matrix[:, b], minlength=cells)
        if len(counts) != cells or np.any(counts != counts[0]) or counts[0] == 0:
            bad.append(f"columns ({a}, {b}): pair counts {counts.tolist()}")
    return bad


def build_design(grid: FactorGrid) -> OrthogonalArray:
    """Smallest embedded design that fits the grid's factor profile.

    * at most 16 combinations: the full factorial;
    * only four-level factors, at most 5: L16(4^5);
    * otherwise up to 9 four-level factors plus two-level ones: L32(2^1 4^9).
      The first two-level factor takes the two-level column, any further
      two-level factor is folded onto a spare four-level column (0,1,0,1).

    Single-level factors are constant and occupy no array column.
    """
    counts = grid.level_counts
    varying = [i for i, c in enumerate(counts) if c > 1]
    four = [i for i in varying if counts[i] == 4]
    two = [i for i in varying if counts[i] == 2]

    if grid.full_size <= 16:
        combos = list(itertools.product(*[range(c) for c in counts]))
        return OrthogonalArray(np.array(combos, dtype=np.int64).reshape(len(combos), len(counts)), tuple(counts), "full-factorial")

    if not two and len(four) <= 5:
        source, base, four_cols, two_cols = "L16", L16, list(range(5)), []
    elif len(four) + max(0, len(two) - 1) <= 9:
        source, base, four_cols, two_cols = "L32", L32, list(range(1, 10)), [0]
    else:
        raise UnsupportedProfileError(
            f"{grid.algorithm}: {len(four)} four-level and {len(two)} two-level factors exceed the embedded arrays"
        )

    rows = base.shape[0]
    out = np.zeros((rows, len(counts)), dtype=np.int64)
    spare = iter(four_cols)
    for i in four:
        out[:, i] = base[:, next(spare)]
    for j, i in enumerate(two):
        if j < len(two_cols):
            out[:, i] = base[:, two_cols[j]]
        else:
            out[:, i] = base[:, next(spare)] % 2
    return OrthogonalArray(out, tuple(counts), source)


def expand_design(array: OrthogonalArray, grid: FactorGrid) -> list[AlgorithmConfig]:
    """Concrete configurations, one per design row."""
    matrix = np.asarray(array.matrix)
    if matrix.ndim != 2 or matrix.shape[1] != len(grid.factors):
        raise DesignError(f"design has {matrix.shape[-1]} columns, grid has {len(grid.factors)} factors")
    configs = []
    for r, row in enumerate(matrix):
        values = {}
        for factor, level in zip(grid.factors, row):
            if not 0 <= level < len(factor.levels):
                raise DesignError(f"row {r}: level {level} out of range for {factor.name}")
            values[factor.name] = factor.levels[level]
        configs.append(make_config(grid.algorithm, values))
    return configs


def level_indices(config: AlgorithmConfig, grid: FactorGrid) -> list[int]:
    """Inverse of :func:`expand_design` for a single configuration."""
    return [list(f.levels).index(getattr(config, f.name)) for f in grid.factors]


MINIMIZE, MAXIMIZE = "min", "max"


@dataclass
class DecisionMatrix:
    values: np.ndarray
    weights: np.ndarray
    directions: tuple[str, ...]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.values.ndim != 2 or self.values.size == 0:
            raise ValueError("decision matrix must be a non-empty 2-D array")
        m = self.values.shape[1]
        if self.weights.shape != (m,) or len(self.directions) != m:
            raise ValueError("need one weight and one direction per criterion")
        if np.any(self.weights < 0):
            raise ValueError("criterion weights must be non-negative")
        if self.weights.sum() <= 0:
            raise ValueError("at least one criterion weight must be positive")
        self.weights = self.weights / self.weights.sum()
        if any(d not in (MINIMIZE, MAXIMIZE) for d in self.directions):
            raise ValueError(f"directions must be {MINIMIZE!r} or {MAXIMIZE!r}")


@dataclass
class TopsisResult:
    closeness: np.ndarray
    order: np.ndarray  # alternative indices, best first

    @property
    def ranks(self) -> np.ndarray:
        """1-based rank of each alternative."""
        ranks = np.empty(len(self.order), dtype=np.int64)
        ranks[self.order] = np.arange(1, len(self.order) + 1)
        return ranks


def topsis_rank(m: DecisionMatrix) -> TopsisResult:
    """Vector-normalised, weighted TOPSIS. Ties keep the lower index first."""
    norms = np.sqrt((m.values ** 2).sum(axis=0))
    normalised = np.divide(m.values, norms, out=np.zeros_like(m.values), where=norms > 0)
    weighted = normalised * m.weights
    maximize = np.array([d == MAXIMIZE for d in m.directions])
    ideal = np.where(maximize, weighted.max(axis=0), weighted.min(axis=0))
    anti = np.where(maximize, weighted.min(axis=0), weighted.max(axis=0))
    d_plus = np.sqrt(((weighted - ideal) ** 2).sum(axis=1))
    d_minus = np.sqrt(((weighted - anti) ** 2).sum(axis=1))
    total = d_plus + d_minus
    closeness = np.divide(d_minus, total, out=np.full_like(total, 0.5), where=total > 0)
    order = np.lexsort((np.arange(len(closeness)), -closeness))
    return TopsisResult(closeness, order)


@dataclass
class ConfigAggregate:
    config: AlgorithmConfig
    mean_cost: float
    mean_nfe: float


def decision_matrix(aggregates: Sequence[ConfigAggregate], weights=(0.5, 0.5)) -> DecisionMatrix:
    values = np.array([[a.mean_cost, a.mean_nfe] for a in aggregates], dtype=float)
    return DecisionMatrix(values, np.asarray(weights, dtype=float), (MINIMIZE, MINIMIZE))


def select_config(aggregates: Sequence[ConfigAggregate], weights=(0.5, 0.5)) -> AlgorithmConfig:
    """Rank-1 configuration by TOPSIS over (mean cost, mean NFE), both minimised."""
    if not aggregates:
        raise ValueError("no configurations to choose from")
    result = topsis_rank(decision_matrix(aggregates, weights))
    return aggregates[int(result.order[0])].config
