"""(1+1) evolutionary algorithm.

One parent, one offspring per step.  Each coordinate mutates independently
with probability 1/dimension by a Gaussian kick whose standard deviation is
a fixed fraction (default 0.1) of that coordinate's bound range.  The
offspring replaces the parent whenever it is not worse.
"""

from __future__ import annotations

import numpy as np

from .common import BudgetExhausted, OptimiserConfig, RunTrace, Tracker, check_bounds, clamp


def run_one_plus_one_ea(objective, bounds, config: OptimiserConfig) -> RunTrace:
    lo, hi = check_bounds(bounds)
    dim = lo.size
    sigma = config.param("sigma_scale", 0.1) * (hi - lo)
    rng = np.random.default_rng(config.seed)
    tracker = Tracker(objective, config.budget)

    try:
        parent = rng.uniform(lo, hi)
        f_parent = tracker(parent)
        while True:
            mask = rng.random(dim) < 1.0 / dim
            child = parent.copy()
            child[mask] += rng.normal(0.0, sigma[mask])
            child = clamp(child, lo, hi)
            f_child = tracker(child)
            if f_child <= f_parent:
                parent, f_parent = child, f_child
    except BudgetExhausted:
        pass
    return tracker.trace("1+1ea", config.seed)
