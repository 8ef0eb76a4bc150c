"""Nelder-Mead simplex search with bound clamping.

Coefficients are the textbook quadruple: reflection 1, expansion 2,
contraction 0.5, shrink 0.5.  The initial simplex is sampled uniformly
inside the bounds from the run seed, and every candidate vertex is clamped
back into the box before evaluation.  The only stopping rule is the
evaluation budget.
"""

from __future__ import annotations

import numpy as np

from .common import BudgetExhausted, OptimiserConfig, RunTrace, Tracker, check_bounds, clamp

REFLECTION = 1.0
EXPANSION = 2.0
CONTRACTION = 0.5
SHRINK = 0.5


def run_nelder_mead(objective, bounds, config: OptimiserConfig) -> RunTrace:
    lo, hi = check_bounds(bounds)
    dim = lo.size
    rng = np.random.default_rng(config.seed)
    tracker = Tracker(objective, config.budget)

    try:
        simplex = rng.uniform(lo, hi, size=(dim + 1, dim))
        init = config.param("init_simplex", None)
        if init is not None:
            init = np.atleast_2d(np.asarray(init, dtype=float))
            simplex[: min(len(init), dim + 1)] = clamp(init[: dim + 1], lo, hi)
        values = np.array([tracker(v) for v in simplex])

        while True:
            order = np.argsort(values, kind="stable")
            simplex, values = simplex[order], values[order]
            best, worst = values[0], values[-1]
            second_worst = values[-2]
            centroid = simplex[:-1].mean(axis=0)

            reflected = clamp(centroid + REFLECTION * (centroid - simplex[-1]), lo, hi)
            f_reflected = tracker(reflected)

            if f_reflected < best:
                expanded = clamp(centroid + EXPANSION * (centroid - simplex[-1]), lo, hi)
                f_expanded = tracker(expanded)
                if f_expanded < f_reflected:
                    simplex[-1], values[-1] = expanded, f_expanded
                else:
                    simplex[-1], values[-1] = reflected, f_reflected
            elif f_reflected < second_worst:
                simplex[-1], values[-1] = reflected, f_reflected
            else:
                if f_reflected < worst:
                    contracted = clamp(centroid + CONTRACTION * (reflected - centroid), lo, hi)
                    f_contracted = tracker(contracted)
                    accept = f_contracted <= f_reflected
                else:
                    contracted = clamp(centroid + CONTRACTION * (simplex[-1] - centroid), lo, hi)
                    f_contracted = tracker(contracted)
                    accept = f_contracted < worst
                if accept:
                    simplex[-1], values[-1] = contracted, f_contracted
                else:
                    for i in range(1, dim + 1):
                        simplex[i] = clamp(
                            simplex[0] + SHRINK * (simplex[i] - simplex[0]), lo, hi
                        )
                        values[i] = tracker(simplex[i])
    except BudgetExhausted:
        pass
    return tracker.trace("nm", config.seed)
