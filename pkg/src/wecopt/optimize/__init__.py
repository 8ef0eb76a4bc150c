"""Derivative-free search algorithms with budget accounting and traces.

Six stand-alone minimisers share one calling convention,
``run(objective, (lower, upper), config) -> RunTrace``:

========  =======================================
tag       algorithm
========  =======================================
nm        Nelder-Mead simplex
1+1ea     (1+1) evolutionary algorithm
pso       particle swarm, global-best topology
cmaes     covariance matrix adaptation ES
de        differential evolution, rand/1/bin
sade      self-adaptive DE, four-strategy pool
========  =======================================

The hybrid block-coordinate scheme (tag ``de-nm``) has an extra argument,
the frozen (radius, aspect ratio) pair, and is driven through
:func:`run_hybrid_de_nm` or :func:`sweep_grid`.
"""

from .common import BudgetExhausted, OptimiserConfig, RunTrace, Tracker
from .cmaes import run_cmaes
from .de import run_de
from .hybrid import run_hybrid_de_nm, sweep_grid
from .nelder_mead import run_nelder_mead
from .one_plus_one import run_one_plus_one_ea
from .pso import run_pso
from .sade import run_sade

ALGORITHMS = {
    "nm": run_nelder_mead,
    "1+1ea": run_one_plus_one_ea,
    "pso": run_pso,
    "cmaes": run_cmaes,
    "de": run_de,
    "sade": run_sade,
}

HYBRID_TAG = "de-nm"


def get_algorithm(tag: str):
    """Look up a stand-alone runner by tag; the hybrid tag is rejected here
    because it needs a frozen geometry (use the sweep interface)."""
    if tag == HYBRID_TAG:
        raise KeyError(
            f"{tag!r} fixes the buoy geometry per run; drive it via sweep_grid "
            "or run_hybrid_de_nm instead"
        )
    try:
        return ALGORITHMS[tag]
    except KeyError:
        known = ", ".join(sorted(ALGORITHMS))
        raise KeyError(f"unknown algorithm {tag!r}; known tags: {known}") from None


__all__ = [
    "ALGORITHMS",
    "HYBRID_TAG",
    "BudgetExhausted",
    "OptimiserConfig",
    "RunTrace",
    "Tracker",
    "get_algorithm",
    "run_cmaes",
    "run_de",
    "run_hybrid_de_nm",
    "run_nelder_mead",
    "run_one_plus_one_ea",
    "run_pso",
    "run_sade",
    "sweep_grid",
]
