"""Shared plumbing for the search algorithms: configuration, budget
accounting and convergence traces.

Every algorithm minimises.  Callers who want to maximise (e.g. absorbed
power) hand in the negated objective and flip the sign of the reported
values.  All algorithms draw their randomness from one seeded generator,
so a (seed, config) pair pins the whole run.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError


@dataclass
class OptimiserConfig:
    """Algorithm tag, evaluation budget, repeat count, base seed and
    algorithm-specific parameter overrides (documented per runner)."""

    algorithm: str = "de"
    budget: int = 5000
    repeats: int = 10
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.budget <= 0:
            raise ConfigError(f"budget must be positive, got {self.budget}")
        if self.repeats <= 0:
            raise ConfigError(f"repeats must be positive, got {self.repeats}")

    def param(self, name, default):
        return self.params.get(name, default)

    def with_overrides(self, **kwargs) -> "OptimiserConfig":
        merged = dict(algorithm=self.algorithm, budget=self.budget, repeats=self.repeats,
                      seed=self.seed, params=dict(self.params))
        merged.update(kwargs)
        return OptimiserConfig(**merged)


@dataclass(frozen=True)
class RunTrace:
    """Best-so-far value after every objective evaluation, plus the winner.

    ``best_values`` is non-increasing (minimisation) and never longer than
    the budget.
    """

    algorithm: str
    seed: int
    best_values: np.ndarray
    best_point: np.ndarray
    best_value: float
    evaluations: int
    wall_time: float

    def __post_init__(self):
        bv = np.asarray(self.best_values, dtype=float)
        if bv.size != self.evaluations:
            raise ValueError("trace length must equal the evaluation count")
        if bv.size and np.any(bv[1:] > bv[:-1]):
            raise ValueError("best-so-far trace must be non-increasing")
        object.__setattr__(self, "best_values", bv)


class BudgetExhausted(Exception):
    """Internal control-flow signal: the evaluation budget is spent."""


class Tracker:
    """Counts objective evaluations, keeps the best-so-far curve and stops
    the run by raising :class:`BudgetExhausted` at the budget."""

    def __init__(self, objective, budget: int):
        self.objective = objective
        self.budget = int(budget)
        self.values: list[float] = []
        self.best = np.inf
        self.best_x: np.ndarray | None = None
        self._t0 = time.perf_counter()

    @property
    def evaluations(self) -> int:
        return len(self.values)

    @property
    def remaining(self) -> int:
        return self.budget - len(self.values)

    def __call__(self, x: np.ndarray) -> float:
        if len(self.values) >= self.budget:
            raise BudgetExhausted
        v = float(self.objective(x))
        if np.isnan(v):
            v = np.inf
        if v < self.best:
            self.best = v
            self.best_x = np.array(x, dtype=float, copy=True)
        self.values.append(self.best)
        return v

    def trace(self, algorithm: str, seed: int) -> RunTrace:
        best_x = self.best_x if self.best_x is not None else np.array([])
        return RunTrace(
            algorithm=algorithm,
            seed=seed,
            best_values=np.asarray(self.values, dtype=float),
            best_point=best_x,
            best_value=self.best,
            evaluations=len(self.values),
            wall_time=time.perf_counter() - self._t0,
        )


def check_bounds(bounds) -> tuple[np.ndarray, np.ndarray]:
    lo = np.asarray(bounds[0], dtype=float)
    hi = np.asarray(bounds[1], dtype=float)
    if lo.shape != hi.shape or lo.ndim != 1:
        raise ConfigError("bounds must be two 1-D arrays of equal length")
    if np.any(hi <= lo):
        raise ConfigError("upper bounds must exceed lower bounds")
    return lo, hi


def clamp(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    return np.minimum(np.maximum(x, lo), hi)
