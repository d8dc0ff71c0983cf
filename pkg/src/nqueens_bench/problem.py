"""N-Queens encoding, clash cost and the move primitives shared by all solvers.

A placement is a length-N integer array; entry ``i`` is the column of the
queen in row ``i``. Duplicate columns are allowed and penalised by the cost.

The clash cost has two parts:

* ``N - number_of_distinct_columns``
* one unit for every *ordered* pair ``(i, j)``, ``i != j``, with
  ``|i - j| == |col[i] - col[j]|``; an attacking diagonal pair therefore
  counts twice.

Both parts are computed in O(N) by counting queens per diagonal: a diagonal
holding ``c`` queens contributes ``c * (c - 1)`` ordered pairs.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

UNIFORM_COLUMNS = "uniform-columns"
RANDOM_PERMUTATION = "random-permutation"
INIT_METHODS = (UNIFORM_COLUMNS, RANDOM_PERMUTATION)


def as_placement(columns: Sequence[int], n: int | None = None) -> np.ndarray:
    """Validate ``columns`` and return it as a 1-D ``int64`` array."""
    arr = np.asarray(columns)
    if arr.ndim != 1:
        raise ValueError(f"placement must be one-dimensional, got shape {arr.shape}")
    if n is None:
        n = arr.size
    if n < 1 or arr.size != n:
        raise ValueError(f"placement length {arr.size} does not match board size {n}")
    if arr.dtype.kind == "f":
        if not np.all(arr == np.round(arr)):
            raise ValueError("placement entries must be integers")
    elif arr.dtype.kind not in "iu":
        raise ValueError(f"placement entries must be integers, got dtype {arr.dtype}")
    arr = arr.astype(np.int64)
    if arr.min() < 0 or arr.max() > n - 1:
        raise ValueError(f"placement entries must lie in [0, {n - 1}]")
    return arr


def max_cost(n: int) -> int:
    """Upper bound on the clash cost for board size ``n``."""
    return (n - 1) + n * (n - 1)


def evaluate_cost(columns: Sequence[int]) -> int:
    """Clash count of a single placement."""
    p = as_placement(columns)
    return int(evaluate_costs(p[None, :])[0])


def evaluate_costs(population: np.ndarray) -> np.ndarray:
    """Clash counts for every row of a ``(k, n)`` integer array.

    No validation is done here; solvers call this in their inner loop and
    are responsible for keeping entries inside ``[0, n - 1]``.
    """
    pop = np.asarray(population, dtype=np.int64)
    k, n = pop.shape
    rows = np.arange(n)
    width = 2 * n - 1
    offsets = (np.arange(k) * width)[:, None]

    col_offsets = (np.arange(k) * n)[:, None]
    col_counts = np.bincount((pop + col_offsets).ravel(), minlength=k * n).reshape(k, n)
    duplicates = n - np.count_nonzero(col_counts, axis=1)

    diag = np.bincount((pop - rows + (n - 1) + offsets).ravel(), minlength=k * width)
    anti = np.bincount((pop + rows + offsets).ravel(), minlength=k * width)
    diag = diag.reshape(k, width)
    anti = anti.reshape(k, width)
    pairs = (diag * (diag - 1)).sum(axis=1) + (anti * (anti - 1)).sum(axis=1)
    return duplicates + pairs


def random_placement(n: int, method: str, rng: np.random.Generator) -> np.ndarray:
    """Draw a starting placement.

    ``uniform-columns`` samples every entry independently; ``random-permutation``
    returns a shuffled ``0..n-1`` so the start carries no duplicate penalty.
    """
    if n < 1:
        raise ValueError("board size must be at least 1")
    if method == UNIFORM_COLUMNS:
        return rng.integers(0, n, size=n, dtype=np.int64)
    if method == RANDOM_PERMUTATION:
        return rng.permutation(n).astype(np.int64)
    raise ValueError(f"unknown init method {method!r}; expected one of {INIT_METHODS}")


def perturbation_size(n: int, radius: float) -> int:
    """Number of rows resampled by :func:`perturb` (half-up rounding)."""
    if not 0.0 < radius <= 1.0:
        raise ValueError(f"radius must lie in (0, 1], got {radius}")
    return min(n, max(1, math.floor(radius * n + 0.5)))


def perturb(columns: np.ndarray, radius: float, rng: np.random.Generator) -> np.ndarray:
    """Copy of ``columns`` with ``perturbation_size`` distinct rows resampled."""
    n = len(columns)
    k = perturbation_size(n, radius)
    out = np.array(columns, dtype=np.int64, copy=True)
    rows = rng.choice(n, size=k, replace=False)
    out[rows] = rng.integers(0, n, size=k)
    return out


def round_half_away(values: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return np.sign(v) * np.floor(np.abs(v) + 0.5)


def decode_continuous(values: Sequence[float], n: int | None = None) -> np.ndarray:
    """Map a real vector (or a ``(k, n)`` matrix of them) onto the board.

    Each coordinate is rounded half away from zero and clamped to ``[0, n - 1]``.
    """
    v = np.asarray(values, dtype=float)
    if n is None:
        n = v.shape[-1]
    if v.shape[-1] != n:
        raise ValueError(f"vector length {v.shape[-1]} does not match board size {n}")
    return np.clip(round_half_away(v), 0, n - 1).astype(np.int64)


def is_solution(columns: Sequence[int]) -> bool:
    return evaluate_cost(columns) == 0
