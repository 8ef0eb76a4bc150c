"""Covariance matrix adaptation evolution strategy.

Standard rank-one plus rank-mu update with cumulative step-size control and
the usual default learning rates, run in coordinates normalised to the unit
box.  The mean starts at the box midpoint with step size 0.3 (i.e. 0.3 of
every bound range).  Out-of-box samples are redrawn up to ten times, then
clamped.  If the covariance degenerates numerically the strategy restarts
from the best point seen so far without resetting the evaluation budget.
"""

from __future__ import annotations

import math

import numpy as np

from .common import BudgetExhausted, OptimiserConfig, RunTrace, Tracker, check_bounds

RESAMPLE_TRIES = 10
MAX_CONDITION = 1e14


def run_cmaes(objective, bounds, config: OptimiserConfig) -> RunTrace:
    lo, hi = check_bounds(bounds)
    dim = lo.size
    span = hi - lo
    lam = int(config.param("population", 16))
    sigma0 = config.param("sigma0", 0.3)
    rng = np.random.default_rng(config.seed)
    tracker = Tracker(objective, config.budget)

    mu = lam // 2
    raw = math.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    weights = raw / raw.sum()
    mu_eff = 1.0 / np.sum(weights**2)

    c_sigma = (mu_eff + 2.0) / (dim + mu_eff + 5.0)
    d_sigma = 1.0 + 2.0 * max(0.0, math.sqrt((mu_eff - 1.0) / (dim + 1.0)) - 1.0) + c_sigma
    c_c = (4.0 + mu_eff / dim) / (dim + 4.0 + 2.0 * mu_eff / dim)
    c_1 = 2.0 / ((dim + 1.3) ** 2 + mu_eff)
    c_mu = min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) / ((dim + 2.0) ** 2 + mu_eff))
    chi_n = math.sqrt(dim) * (1.0 - 1.0 / (4.0 * dim) + 1.0 / (21.0 * dim**2))

    def fresh_state(mean):
        return {
            "mean": mean,
            "sigma": sigma0,
            "cov": np.eye(dim),
            "p_sigma": np.zeros(dim),
            "p_c": np.zeros(dim),
            "gen": 0,
        }

    st = fresh_state(np.full(dim, 0.5))

    def decompose(cov):
        vals, vecs = np.linalg.eigh(cov)
        return vals, vecs

    try:
        while True:
            vals, vecs = decompose(st["cov"])
            degenerate = (
                not np.all(np.isfinite(vals))
                or vals[-1] <= 0
                or vals[-1] / max(vals[0], 1e-300) > MAX_CONDITION
                or not np.isfinite(st["sigma"])
                or st["sigma"] <= 1e-12
                or st["sigma"] > 1e6
            )
            if degenerate:
                seed_mean = (
                    (tracker.best_x - lo) / span if tracker.best_x is not None else np.full(dim, 0.5)
                )
                st = fresh_state(seed_mean.copy())
                vals, vecs = decompose(st["cov"])
            sqrt_vals = np.sqrt(np.maximum(vals, 0.0))

            xs = np.empty((lam, dim))
            ys = np.empty((lam, dim))
            fs = np.empty(lam)
            for k in range(lam):
                for _ in range(RESAMPLE_TRIES):
                    y = vecs @ (sqrt_vals * rng.standard_normal(dim))
                    x = st["mean"] + st["sigma"] * y
                    if np.all(x >= 0.0) and np.all(x <= 1.0):
                        break
                x = np.clip(x, 0.0, 1.0)
                y = (x - st["mean"]) / st["sigma"]
                xs[k], ys[k] = x, y
                fs[k] = tracker(lo + x * span)

            order = np.argsort(fs, kind="stable")[:mu]
            y_w = weights @ ys[order]
            st["mean"] = st["mean"] + st["sigma"] * y_w
            st["gen"] += 1

            inv_sqrt = vecs @ np.diag(1.0 / np.maximum(sqrt_vals, 1e-150)) @ vecs.T
            st["p_sigma"] = (1.0 - c_sigma) * st["p_sigma"] + math.sqrt(
                c_sigma * (2.0 - c_sigma) * mu_eff
            ) * (inv_sqrt @ y_w)
            p_sigma_norm = np.linalg.norm(st["p_sigma"])
            h_sigma = p_sigma_norm / math.sqrt(
                1.0 - (1.0 - c_sigma) ** (2.0 * st["gen"])
            ) < (1.4 + 2.0 / (dim + 1.0)) * chi_n

            st["p_c"] = (1.0 - c_c) * st["p_c"] + (
                math.sqrt(c_c * (2.0 - c_c) * mu_eff) * y_w if h_sigma else 0.0
            )
            rank_mu = np.einsum("i,ij,ik->jk", weights, ys[order], ys[order])
            st["cov"] = (
                (1.0 - c_1 - c_mu) * st["cov"]
                + c_1
                * (
                    np.outer(st["p_c"], st["p_c"])
                    + (0.0 if h_sigma else c_c * (2.0 - c_c)) * st["cov"]
                )
                + c_mu * rank_mu
            )
            st["cov"] = 0.5 * (st["cov"] + st["cov"].T)
            st["sigma"] *= math.exp((c_sigma / d_sigma) * (p_sigma_norm / chi_n - 1.0))
    except BudgetExhausted:
        pass
    return tracker.trace("cmaes", config.seed)
