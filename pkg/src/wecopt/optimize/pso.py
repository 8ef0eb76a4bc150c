"""Particle swarm optimisation, global-best topology.

Velocity update v <- w v + c1 r1 (pbest - x) + c2 r2 (gbest - x) with
per-dimension uniform random factors r1, r2; the inertia weight starts at
1.0 and is multiplied by a damping ratio of 0.99 after every iteration.
Particles leaving the box are clamped and the velocity component along each
clamped coordinate is zeroed.  The swarm's global best is refreshed once per
iteration, after all particles have been evaluated.
"""

from __future__ import annotations

import numpy as np

from .common import BudgetExhausted, OptimiserConfig, RunTrace, Tracker, check_bounds

DEFAULTS = {"population": 25, "c1": 1.5, "c2": 2.0, "inertia": 1.0, "damping": 0.99}


def run_pso(objective, bounds, config: OptimiserConfig) -> RunTrace:
    lo, hi = check_bounds(bounds)
    dim = lo.size
    pop = int(config.param("population", DEFAULTS["population"]))
    c1 = config.param("c1", DEFAULTS["c1"])
    c2 = config.param("c2", DEFAULTS["c2"])
    inertia = config.param("inertia", DEFAULTS["inertia"])
    damping = config.param("damping", DEFAULTS["damping"])
    rng = np.random.default_rng(config.seed)
    tracker = Tracker(objective, config.budget)

    try:
        x = rng.uniform(lo, hi, size=(pop, dim))
        init = config.param("init_population", None)
        if init is not None:
            init = np.atleast_2d(np.asarray(init, dtype=float))
            x[: min(len(init), pop)] = np.clip(init[:pop], lo, hi)
        v = np.zeros((pop, dim))
        f = np.array([tracker(p) for p in x])
        pbest, f_pbest = x.copy(), f.copy()
        g = int(np.argmin(f_pbest))
        gbest, f_gbest = pbest[g].copy(), f_pbest[g]

        while True:
            for i in range(pop):
                r1 = rng.random(dim)
                r2 = rng.random(dim)
                v[i] = inertia * v[i] + c1 * r1 * (pbest[i] - x[i]) + c2 * r2 * (gbest - x[i])
                moved = x[i] + v[i]
                clamped = np.clip(moved, lo, hi)
                v[i][clamped != moved] = 0.0
                x[i] = clamped
                f[i] = tracker(x[i])
                if f[i] < f_pbest[i]:
                    pbest[i], f_pbest[i] = x[i].copy(), f[i]
            g = int(np.argmin(f_pbest))
            if f_pbest[g] < f_gbest:
                gbest, f_gbest = pbest[g].copy(), f_pbest[g]
            inertia *= damping
    except BudgetExhausted:
        pass
    return tracker.trace("pso", config.seed)
