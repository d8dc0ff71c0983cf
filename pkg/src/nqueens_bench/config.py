"""Per-algorithm parameter records, their tuning grids and published tuned values."""
from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass, fields
from typing import Any, ClassVar, Mapping


class InvalidConfigError(ValueError):
    """Raised for structurally impossible parameter combinations."""


class OutOfGridWarning(UserWarning):
    """A parameter value is valid but not one of the grid levels."""


@dataclass(frozen=True)
class AlgorithmConfig:
    kind: ClassVar[str] = ""

    def validate(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidConfigError(f"{self.kind}.{f.name} must be numeric, got {value!r}")
            if value != value:  # NaN
                raise InvalidConfigError(f"{self.kind}.{f.name} is NaN")
        self._check_structure()
        grid = GRIDS[self.kind]
        for name, levels in grid.items():
            value = getattr(self, name)
            if not any(value == level for level in levels):
                warnings.warn(
                    f"{self.kind}.{name}={value} is outside the tuning grid {list(levels)}",
                    OutOfGridWarning,
                    stacklevel=3,
                )

    def _check_structure(self) -> None:
        raise NotImplementedError

    def to_dict(self) -> dict[str, Any]:
        return {"algorithm": self.kind, **dataclasses.asdict(self)}

    @property
    def max_stall_iterations(self) -> int:
        return int(getattr(self, "max_stall"))


def _positive_int(cfg: AlgorithmConfig, *names: str, minimum: int = 1) -> None:
    for name in names:
        value = getattr(cfg, name)
        if int(value) != value or value < minimum:
            raise InvalidConfigError(f"{cfg.kind}.{name} must be an integer >= {minimum}, got {value}")


def _in_range(cfg: AlgorithmConfig, name: str, lo: float, hi: float, *, lo_open=False) -> None:
    value = getattr(cfg, name)
    ok = (value > lo if lo_open else value >= lo) and value <= hi
    if not ok:
        bracket = "(" if lo_open else "["
        raise InvalidConfigError(f"{cfg.kind}.{name} must lie in {bracket}{lo}, {hi}], got {value}")


@dataclass(frozen=True)
class BradoConfig(AlgorithmConfig):
    kind: ClassVar[str] = "brado"
    alpha: int = 15
    wg: float = 0.8
    d: float = 0.15
    p0: int = 90
    p_er: float = 0.6
    p_return: float = 0.2
    n_countries: int = 6
    max_stall: int = 100

    def _check_structure(self) -> None:
        _positive_int(self, "alpha", "max_stall")
        _positive_int(self, "p0", minimum=2)
        _positive_int(self, "n_countries")
        if self.n_countries > self.p0:
            raise InvalidConfigError("brado.n_countries cannot exceed the population p0")
        _in_range(self, "wg", 0.0, 1.0, lo_open=True)
        _in_range(self, "d", 0.0, 1.0)
        _in_range(self, "p_er", 0.0, 1.0, lo_open=True)
        _in_range(self, "p_return", 0.0, 1.0)


@dataclass(frozen=True)
class GAConfig(AlgorithmConfig):
    kind: ClassVar[str] = "ga"
    max_stall: int = 150
    pop_size: int = 50
    crossover_prob: float = 0.1
    survival_rate: float = 0.6

    def _check_structure(self) -> None:
        _positive_int(self, "max_stall")
        _positive_int(self, "pop_size", minimum=2)
        _in_range(self, "crossover_prob", 0.0, 1.0)
        # survival_rate = 1 would leave no room for offspring
        _in_range(self, "survival_rate", 0.0, 1.0, lo_open=True)
        if self.survival_rate >= 1.0:
            raise InvalidConfigError("ga.survival_rate must be < 1")


@dataclass(frozen=True)
class ICAConfig(AlgorithmConfig):
    kind: ClassVar[str] = "ica"
    revolution_rate: float = 0.4
    uniting_threshold: float = 0.02
    zeta: float = 0.04
    pop_size: int = 90
    assimilation_coeff: float = 1.0
    n_imperialists: int = 8
    max_stall: int = 100

    def _check_structure(self) -> None:
        _positive_int(self, "max_stall")
        _positive_int(self, "pop_size", minimum=2)
        _positive_int(self, "n_imperialists")
        if self.n_imperialists >= self.pop_size:
            raise InvalidConfigError("ica.n_imperialists must be smaller than pop_size")
        _in_range(self, "revolution_rate", 0.0, 1.0)
        _in_range(self, "uniting_threshold", 0.0, 1.0)
        _in_range(self, "zeta", 0.0, 1.0)
        if self.assimilation_coeff <= 0:
            raise InvalidConfigError("ica.assimilation_coeff must be positive")


@dataclass(frozen=True)
class PSOConfig(AlgorithmConfig):
    kind: ClassVar[str] = "pso"
    max_stall: int = 30
    pop_size: int = 100
    c_cognitive: float = 1.5
    c_social: float = 0.5

    def _check_structure(self) -> None:
        _positive_int(self, "max_stall")
        _positive_int(self, "pop_size", minimum=2)
        if self.c_cognitive < 0 or self.c_social < 0:
            raise InvalidConfigError("pso acceleration coefficients must be non-negative")


@dataclass(frozen=True)
class ILSConfig(AlgorithmConfig):
    kind: ClassVar[str] = "ils"
    init_method: int = 1
    max_stall: int = 100
    radius: float = 1.0
    n_restarts: int = 15

    def _check_structure(self) -> None:
        if self.init_method not in (1, 2):
            raise InvalidConfigError("ils.init_method must be 1 (uniform columns) or 2 (permutation)")
        _positive_int(self, "max_stall", "n_restarts")
        _in_range(self, "radius", 0.0, 1.0, lo_open=True)


@dataclass(frozen=True)
class LSConfig(AlgorithmConfig):
    kind: ClassVar[str] = "ls"
    max_stall: int = 150
    radius: float = 0.8

    def _check_structure(self) -> None:
        _positive_int(self, "max_stall")
        _in_range(self, "radius", 0.0, 1.0, lo_open=True)


@dataclass(frozen=True)
class MLSConfig(AlgorithmConfig):
    kind: ClassVar[str] = "mls"
    max_stall: int = 150
    radius: float = 1.0
    n_restarts: int = 20

    def _check_structure(self) -> None:
        _positive_int(self, "max_stall", "n_restarts")
        _in_range(self, "radius", 0.0, 1.0, lo_open=True)


CONFIG_TYPES: dict[str, type[AlgorithmConfig]] = {
    cls.kind: cls
    for cls in (BradoConfig, GAConfig, ICAConfig, PSOConfig, ILSConfig, LSConfig, MLSConfig)
}
ALGORITHMS: tuple[str, ...] = ("brado", "ga", "ica", "ils", "ls", "mls", "pso")

_STALL = (30, 70, 100, 150)
_RADIUS = (0.2, 0.5, 0.8, 1.0)
_RESTARTS = (5, 10, 15, 20)

# Candidate levels per parameter, in the factor order used by the designs.
GRIDS: dict[str, dict[str, tuple]] = {
    "brado": {
        "alpha": (10, 15, 20, 25),
        "wg": (0.6, 0.7, 0.8, 0.9),
        "d": (0.1, 0.15, 0.2, 0.25),
        "p0": (30, 50, 70, 90),
        "p_er": (0.6, 0.7, 0.8, 0.9),
        "p_return": (0.1, 0.2),
        "n_countries": (5, 6, 7, 8),
        "max_stall": _STALL,
    },
    "ga": {
        "max_stall": _STALL,
        "pop_size": (30, 50, 80, 100),
        "crossover_prob": (0.1, 0.2, 0.3, 0.4),
        "survival_rate": (0.4, 0.5, 0.6, 0.7),
    },
    "ica": {
        "revolution_rate": (0.2, 0.3, 0.4, 0.5),
        "uniting_threshold": (0.01, 0.02, 0.03, 0.04),
        "zeta": (0.01, 0.02, 0.03, 0.04),
        "pop_size": (70, 80, 90, 100),
        "assimilation_coeff": (1, 2, 3, 4),
        "n_imperialists": (5, 6, 7, 8),
        "max_stall": _STALL,
    },
    "pso": {
        "max_stall": _STALL,
        "pop_size": (30, 50, 80, 100),
        "c_cognitive": (0.5, 1.0, 1.5, 2.0),
        "c_social": (0.5, 1.0, 1.5, 2.0),
    },
    "ils": {
        "init_method": (1, 2),
        "max_stall": _STALL,
        "radius": _RADIUS,
        "n_restarts": _RESTARTS,
    },
    "ls": {
        "max_stall": _STALL,
        "radius": _RADIUS,
    },
    "mls": {
        "max_stall": _STALL,
        "radius": _RADIUS,
        "n_restarts": _RESTARTS,
    },
}

# Winning configurations reported for each board size, in GRIDS factor order.
_TUNED_ROWS: dict[int, dict[str, tuple]] = {
    8: {
        "brado": (15, 0.8, 0.15, 90, 0.6, 0.2, 6, 100),
        "ga": (150, 50, 0.1, 0.6),
        "ica": (0.4, 0.02, 0.04, 90, 1, 8, 100),
        "ils": (1, 100, 1.0, 15),
        "ls": (150, 0.8),
        "mls": (150, 1.0, 20),
        "pso": (30, 100, 1.5, 0.5),
    },
    10: {
        "brado": (20, 0.7, 0.1, 90, 0.6, 0.2, 6, 150),
        "ga": (150, 100, 0.1, 0.4),
        "ica": (0.3, 0.01, 0.01, 80, 1, 7, 150),
        "ils": (1, 70, 1.0, 15),
        "ls": (150, 1.0),
        "mls": (100, 1.0, 20),
        "pso": (100, 100, 1.0, 0.5),
    },
    25: {
        "brado": (20, 0.8, 0.1, 80, 0.6, 0.2, 7, 150),
        "ga": (150, 30, 0.1, 0.4),
        "ica": (0.3, 0.1, 0.03, 70, 1, 6, 100),
        "ils": (1, 100, 0.8, 20),
        "ls": (150, 0.8),
        "mls": (150, 1.0, 15),
        "pso": (70, 100, 1.5, 0.5),
    },
    50: {
        "brado": (20, 0.8, 0.1, 70, 0.8, 0.1, 5, 150),
        "ga": (150, 30, 0.1, 0.4),
        "ica": (0.2, 0.01, 0.03, 80, 1, 6, 150),
        "ils": (1, 150, 0.8, 15),
        "ls": (70, 0.8),
        "mls": (150, 1.0, 20),
        "pso": (70, 100, 2.0, 0.5),
    },
    100: {
        "brado": (12, 0.8, 0.25, 100, 0.8, 0.1, 7, 150),
        "ga": (30, 30, 0.1, 0.5),
        "ica": (0.5, 0.01, 0.04, 90, 1, 7, 100),
        "ils": (1, 150, 1.0, 20),
        "ls": (30, 0.2),
        "mls": (100, 1.0, 20),
        "pso": (100, 100, 1.0, 0.5),
    },
    200: {
        "brado": (20, 0.8, 0.2, 70, 0.8, 0.2, 8, 150),
        "ga": (150, 30, 0.1, 0.4),
        "ica": (0.3, 0.01, 0.01, 100, 1, 7, 150),
        "ils": (1, 150, 1.0, 20),
        "ls": (30, 0.2),
        "mls": (150, 1.0, 5),
        "pso": (150, 50, 1.5, 1.5),
    },
    300: {
        "brado": (12, 0.8, 0.2, 100, 0.8, 0.1, 6, 150),
        "ga": (150, 30, 0.1, 0.4),
        "ica": (0.2, 0.01, 0.04, 100, 2, 5, 150),
        "ils": (1, 70, 1.0, 15),
        "ls": (30, 0.2),
        "mls": (30, 1.0, 5),
        "pso": (70, 80, 2.0, 1.5),
    },
    500: {
        "brado": (10, 0.8, 0.25, 100, 0.8, 0.1, 5, 150),
        "ga": (150, 30, 0.1, 0.5),
        "ica": (0.4, 0.03, 0.04, 90, 2, 6, 150),
        "ils": (2, 70, 1.0, 5),
        "ls": (30, 0.2),
        "mls": (30, 1.0, 5),
        "pso": (70, 80, 2.0, 1.0),
    },
    1000: {
        "brado": (10, 0.8, 0.15, 70, 0.9, 0.1, 6, 150),
        "ga": (70, 30, 0.1, 0.4),
        "ica": (0.04, 0.04, 0.03, 90, 2, 5, 100),
        "ils": (2, 30, 1.0, 5),
        "ls": (30, 0.5),
        "mls": (30, 1.0, 5),
        "pso": (70, 30, 1.0, 2.0),
    },
}

TUNED_SIZES: tuple[int, ...] = tuple(sorted(_TUNED_ROWS))


def make_config(algorithm: str, values: Mapping[str, Any] | None = None, *, validate=True) -> AlgorithmConfig:
    """Build a config of the given kind from a name->value mapping."""
    try:
        cls = CONFIG_TYPES[algorithm]
    except KeyError:
        raise InvalidConfigError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}") from None
    values = dict(values or {})
    values.pop("algorithm", None)
    known = {f.name: f for f in fields(cls)}
    unknown = set(values) - set(known)
    if unknown:
        raise InvalidConfigError(f"unknown {algorithm} parameters: {sorted(unknown)}")
    for name, value in list(values.items()):
        if known[name].type in ("int", int) and isinstance(value, float) and value.is_integer():
            values[name] = int(value)
    cfg = cls(**values)
    if validate:
        cfg.validate()
    return cfg


def config_from_dict(data: Mapping[str, Any]) -> AlgorithmConfig:
    return make_config(data["algorithm"], {k: v for k, v in data.items() if k != "algorithm"})


def tuned_config(algorithm: str, n: int) -> AlgorithmConfig:
    """Published tuned configuration for ``algorithm`` at board size ``n``.

    Some published values sit outside the tuning grid (e.g. ICA at 1000 queens
    lists a revolution rate of 0.04); those are kept and raise an
    :class:`OutOfGridWarning` when validated.
    """
    if n not in _TUNED_ROWS:
        raise KeyError(f"no tuned values for board size {n}; available: {TUNED_SIZES}")
    row = _TUNED_ROWS[n][algorithm]
    values = dict(zip(GRIDS[algorithm], row))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutOfGridWarning)
        return make_config(algorithm, values)
