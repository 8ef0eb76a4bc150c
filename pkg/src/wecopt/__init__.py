"""Spectral-domain simulation and design optimisation of a submerged
three-tether wave energy converter.

The model chain: a Pierson-Moskowitz sea drives a six degree of freedom
cylinder through linear hydrodynamic coefficients; quadratic viscous drag is
statistically linearised, so each sea state reduces to a small fixed-point
iteration over frequency-domain solves.  Tether power take-off settings and
the buoy geometry form a bounded design vector whose annual average power
and cost proxy are optimised with a family of derivative-free algorithms.
"""

from .errors import BoundsError, ConfigError, GeometryError, NumericalError, ParseError
from .geometry import GRAVITY, WATER_DENSITY, WecGeometry
from .hydro import (
    AnalyticHydro,
    DragModel,
    FrequencyGrid,
    HydroCoefficients,
    SeaState,
    TableHydro,
    analytic_hydro,
    build_drag_model,
    default_grid,
    heave_drag_coefficient,
    load_hydro_table,
    pm_spectrum,
    save_hydro_table,
    wavenumber,
)
from .dynamics import (
    PtoSetting,
    SpectralResponse,
    TetherForceStats,
    inverse_jacobian,
    mass_matrix,
    pto_6dof_matrices,
    solve_spectral,
    solve_spectral_batch,
    tether_force_stats,
)
from .objectives import (
    DesignVector,
    EvaluationRecord,
    WaveClimate,
    annual_average_power,
    decode,
    design_bounds,
    encode,
    evaluate_design,
    lcoe,
    load_climate,
    make_objective,
    significant_mass,
)
from .optimize import (
    ALGORITHMS,
    OptimiserConfig,
    RunTrace,
    get_algorithm,
    run_cmaes,
    run_de,
    run_hybrid_de_nm,
    run_nelder_mead,
    run_one_plus_one_ea,
    run_pso,
    run_sade,
    sweep_grid,
)

__version__ = "0.1.0"
