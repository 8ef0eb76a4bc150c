"""Self-adaptive differential evolution with a four-strategy pool.

Strategies: rand/1/bin, rand-to-best/2/bin, rand/2/bin and current-to-rand/1
(the last without crossover).  Each trial picks its strategy by roulette;
selection probabilities start uniform and, once a learning window of 50
generations has filled, are refreshed every generation from the windowed
success rates with a floor of 0.01 per strategy.  The scale factor is drawn
per trial from Normal(0.5, 0.3) truncated to (0, 1]; each crossover-based
strategy keeps its own crossover-rate centre, re-estimated as the median of
the window's successful draws.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from ..errors import ConfigError
from .common import BudgetExhausted, OptimiserConfig, RunTrace, Tracker, check_bounds, clamp
from .de import binomial_crossover, _distinct_indices

N_STRATEGIES = 4
PROBABILITY_FLOOR = 0.01
LEARNING_PERIOD = 50
MIN_POPULATION = 6  # rand/2 needs five distinct partners besides the target


def _draw_f(rng) -> float:
    while True:
        f = rng.normal(0.5, 0.3)
        if 0.0 < f <= 1.0:
            return f


def update_probabilities(successes, failures, floor: float = PROBABILITY_FLOOR) -> np.ndarray:
    """Selection probabilities from windowed success/failure counts.

    Each strategy gets the floor plus a share of the remainder proportional
    to its success rate, so the result always sums to one with every entry
    at least ``floor``.  With no successes anywhere the pool stays uniform.
    """
    ns = np.asarray(successes, dtype=float)
    nf = np.asarray(failures, dtype=float)
    n = ns.size
    rates = np.divide(ns, ns + nf, out=np.zeros(n), where=(ns + nf) > 0)
    total = rates.sum()
    if total <= 0:
        return np.full(n, 1.0 / n)
    return floor + (1.0 - n * floor) * (rates / total)


def run_sade(objective, bounds, config: OptimiserConfig) -> RunTrace:
    lo, hi = check_bounds(bounds)
    pop = int(config.param("population", 25))
    lp = int(config.param("learning_period", LEARNING_PERIOD))
    if pop < MIN_POPULATION:
        raise ConfigError(f"self-adaptive DE needs a population of at least {MIN_POPULATION}")
    rng = np.random.default_rng(config.seed)
    tracker = Tracker(objective, config.budget)

    probs = np.full(N_STRATEGIES, 1.0 / N_STRATEGIES)
    cr_centre = np.full(N_STRATEGIES, 0.5)
    success_window = deque(maxlen=lp)   # per generation: (successes, failures) arrays
    cr_window = deque(maxlen=lp)        # per generation: list of successful CRs per strategy

    def build_trial(i, x, f_vals, strategy):
        f = _draw_f(rng)
        if strategy == 3:  # current-to-rand/1, arithmetic recombination, no crossover
            r1, r2, r3 = _distinct_indices(rng, pop, i, 3)
            k = rng.random()
            trial = x[i] + k * (x[r1] - x[i]) + f * (x[r2] - x[r3])
            return trial, None
        cr = float(np.clip(rng.normal(cr_centre[strategy], 0.1), 0.0, 1.0))
        if strategy == 0:  # rand/1/bin
            r1, r2, r3 = _distinct_indices(rng, pop, i, 3)
            mutant = x[r1] + f * (x[r2] - x[r3])
        elif strategy == 1:  # rand-to-best/2/bin
            best = int(np.argmin(f_vals))
            r1, r2, r3, r4 = _distinct_indices(rng, pop, i, 4)
            mutant = x[i] + f * (x[best] - x[i]) + f * (x[r1] - x[r2]) + f * (x[r3] - x[r4])
        else:  # rand/2/bin
            r1, r2, r3, r4, r5 = _distinct_indices(rng, pop, i, 5)
            mutant = x[r1] + f * (x[r2] - x[r3]) + f * (x[r4] - x[r5])
        return binomial_crossover(rng, x[i], mutant, cr), cr

    try:
        x = rng.uniform(lo, hi, size=(pop, lo.size))
        f_vals = np.array([tracker(p) for p in x])

        while True:
            gen_success = np.zeros(N_STRATEGIES)
            gen_failure = np.zeros(N_STRATEGIES)
            gen_crs: list[list[float]] = [[] for _ in range(N_STRATEGIES)]
            new_x = x.copy()
            new_f = f_vals.copy()
            for i in range(pop):
                strategy = int(rng.choice(N_STRATEGIES, p=probs))
                trial, cr = build_trial(i, x, f_vals, strategy)
                trial = clamp(trial, lo, hi)
                f_trial = tracker(trial)
                if f_trial <= f_vals[i]:
                    new_x[i], new_f[i] = trial, f_trial
                    gen_success[strategy] += 1
                    if cr is not None:
                        gen_crs[strategy].append(cr)
                else:
                    gen_failure[strategy] += 1
            x, f_vals = new_x, new_f

            success_window.append((gen_success, gen_failure))
            cr_window.append(gen_crs)
            if len(success_window) >= lp:
                ns = np.sum([s for s, _ in success_window], axis=0)
                nf = np.sum([f for _, f in success_window], axis=0)
                probs = update_probabilities(ns, nf)
                for s in range(N_STRATEGIES):
                    pooled = [c for gen in cr_window for c in gen[s]]
                    if pooled:
                        cr_centre[s] = float(np.median(pooled))
    except BudgetExhausted:
        pass
    return tracker.trace("sade", config.seed)
