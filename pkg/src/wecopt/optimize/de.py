"""Differential evolution, rand/1/bin variant.

Mutant = x_r1 + F (x_r2 - x_r3) over three distinct non-target members,
binomial crossover with one forced coordinate, greedy replacement.
Population updates are synchronous: all trials of a generation are built
from the previous generation.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .common import BudgetExhausted, OptimiserConfig, RunTrace, Tracker, check_bounds, clamp

DEFAULTS = {"population": 25, "f": 0.5, "cr": 0.8}


def _distinct_indices(rng, pop: int, exclude: int, count: int) -> np.ndarray:
    choices = np.delete(np.arange(pop), exclude)
    return rng.choice(choices, size=count, replace=False)


def binomial_crossover(rng, target: np.ndarray, mutant: np.ndarray, cr: float) -> np.ndarray:
    """Mix mutant coordinates into the target with probability ``cr``; one
    randomly forced coordinate always comes from the mutant."""
    dim = target.size
    take = rng.random(dim) < cr
    take[rng.integers(dim)] = True
    return np.where(take, mutant, target)


def run_de(objective, bounds, config: OptimiserConfig, algorithm_tag: str = "de") -> RunTrace:
    lo, hi = check_bounds(bounds)
    dim = lo.size
    pop = int(config.param("population", DEFAULTS["population"]))
    f_weight = config.param("f", DEFAULTS["f"])
    cr = config.param("cr", DEFAULTS["cr"])
    if pop < 4:
        raise ConfigError("differential evolution needs a population of at least 4")
    rng = np.random.default_rng(config.seed)
    tracker = Tracker(objective, config.budget)

    try:
        x = rng.uniform(lo, hi, size=(pop, dim))
        init = config.param("init_population", None)
        if init is not None:
            init = np.atleast_2d(np.asarray(init, dtype=float))
            x[: min(len(init), pop)] = clamp(init[:pop], lo, hi)
        f_vals = np.array([tracker(p) for p in x])

        while True:
            new_x = x.copy()
            new_f = f_vals.copy()
            for i in range(pop):
                r1, r2, r3 = _distinct_indices(rng, pop, i, 3)
                mutant = x[r1] + f_weight * (x[r2] - x[r3])
                trial = clamp(binomial_crossover(rng, x[i], mutant, cr), lo, hi)
                f_trial = tracker(trial)
                if f_trial <= f_vals[i]:
                    new_x[i], new_f[i] = trial, f_trial
            x, f_vals = new_x, new_f
    except BudgetExhausted:
        pass
    return tracker.trace(algorithm_tag, config.seed)
