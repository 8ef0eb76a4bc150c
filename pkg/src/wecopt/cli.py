"""Command-line front end.

Three subcommands: ``evaluate`` scores one design file against a climate,
``optimise`` runs seeded repeats of the selected search algorithms and
writes traces plus box-plot-ready summaries, and ``sweep`` maps the best
achievable objective over a (radius, aspect ratio) grid using the hybrid
block-coordinate search.

Configuration comes from an optional JSON file plus command-line flags;
flags win over the file, the file wins over built-in defaults.  All outputs
are plain text.  Convergence traces contain no timing information, so a
rerun with the same seed reproduces them byte for byte; summaries carry
wall-clock times and are exempt from that guarantee.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import BoundsError, ConfigError, ParseError
from .hydro import AnalyticHydro, FrequencyGrid, SeaState, TableHydro
from .objectives import (
    DesignVector,
    WaveClimate,
    decode,
    evaluate_design,
    load_climate,
    make_objective,
)
from .optimize import ALGORITHMS, HYBRID_TAG, OptimiserConfig, get_algorithm, sweep_grid

DEFAULT_ALGORITHMS = ["nm", "1+1ea", "pso", "cmaes", "de", "sade"]
DEFAULT_SWEEP_RADII = [8.0, 12.0, 16.0, 20.0]
DEFAULT_SWEEP_ASPECTS = [0.4, 1.0, 1.5]

EXIT_OK = 0
EXIT_PARTIAL = 1
EXIT_BAD_INPUT = 2


@dataclass
class CampaignConfig:
    """Resolved run configuration (defaults < config file < flags)."""

    objective: str = "power"
    algorithms: list = field(default_factory=lambda: list(DEFAULT_ALGORITHMS))
    budget: int = 5000
    repeats: int = 10
    seed: int = 0
    climate: str | None = None
    hydro: str = "analytic"
    jobs: int = 1
    out: str = "runs"
    freq_min: float = 0.1
    freq_max: float = 3.0
    freq_points: int = 60
    radius_grid: list = field(default_factory=lambda: list(DEFAULT_SWEEP_RADII))
    aspect_grid: list = field(default_factory=lambda: list(DEFAULT_SWEEP_ASPECTS))
    de_budget: int = 800
    nm_budget: int = 200

    def validate(self):
        if self.objective not in ("power", "lcoe"):
            raise ConfigError(f"objective must be 'power' or 'lcoe', got {self.objective!r}")
        if self.budget <= 0:
            raise ConfigError("budget must be positive")
        if self.repeats <= 0:
            raise ConfigError("repeats must be positive")
        if self.jobs <= 0:
            raise ConfigError("jobs must be positive")
        for tag in self.algorithms:
            if tag not in ALGORITHMS and tag != HYBRID_TAG:
                known = ", ".join(sorted(ALGORITHMS) + [HYBRID_TAG])
                raise ConfigError(f"unknown algorithm {tag!r}; known: {known}")
        if self.climate is None:
            raise ConfigError("a climate CSV is required (--climate or config file)")


_CONFIG_KEYS = {
    "objective": "objective",
    "algorithms": "algorithms",
    "budget": "budget",
    "repeats": "repeats",
    "seed": "seed",
    "climate": "climate",
    "hydro": "hydro",
    "jobs": "jobs",
    "out": "out",
}


def _load_config_file(path: str) -> dict:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    out = {}
    for key, attr in _CONFIG_KEYS.items():
        if key in raw:
            out[attr] = raw[key]
    freq = raw.get("frequencies", {})
    if "min" in freq:
        out["freq_min"] = freq["min"]
    if "max" in freq:
        out["freq_max"] = freq["max"]
    if "points" in freq:
        out["freq_points"] = freq["points"]
    sweep = raw.get("sweep", {})
    if "radius_grid" in sweep:
        out["radius_grid"] = sweep["radius_grid"]
    if "aspect_grid" in sweep:
        out["aspect_grid"] = sweep["aspect_grid"]
    if "de_budget" in sweep:
        out["de_budget"] = sweep["de_budget"]
    if "nm_budget" in sweep:
        out["nm_budget"] = sweep["nm_budget"]
    unknown = set(raw) - set(_CONFIG_KEYS) - {"frequencies", "sweep"}
    if unknown:
        raise ConfigError(f"config file {path}: unknown keys {sorted(unknown)}")
    return out


def resolve_config(args) -> CampaignConfig:
    cfg = CampaignConfig()
    if args.config:
        cfg = replace(cfg, **_load_config_file(args.config))
    overrides = {}
    if args.objective is not None:
        overrides["objective"] = args.objective
    if args.algo is not None:
        overrides["algorithms"] = [t.strip() for t in args.algo.split(",") if t.strip()]
    for flag in ("budget", "repeats", "seed", "climate", "hydro", "jobs", "out"):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[flag] = value
    cfg = replace(cfg, **overrides)
    cfg.validate()
    return cfg


def build_provider(cfg: CampaignConfig):
    grid = FrequencyGrid(np.linspace(cfg.freq_min, cfg.freq_max, cfg.freq_points))
    if cfg.hydro == "analytic":
        return AnalyticHydro(grid)
    # anything else is a path to a coefficient table; the table pins one
    # hull's coefficients for every geometry, which suits PTO-only studies
    return TableHydro.from_file(cfg.hydro, grid=grid)


def _climate_payload(climate: WaveClimate) -> dict:
    return {
        "states": [(s.hs, s.tp) for s in climate.states],
        "probabilities": list(climate.probabilities),
        "site": climate.site,
    }


def _climate_from_payload(payload: dict) -> WaveClimate:
    return WaveClimate(
        states=tuple(SeaState(hs, tp) for hs, tp in payload["states"]),
        probabilities=tuple(payload["probabilities"]),
        site=payload.get("site", ""),
    )


def _run_one(payload: dict) -> dict:
    """Worker for one (algorithm, seed) run; takes and returns primitives so
    it can cross a process boundary."""
    cfg = CampaignConfig(**payload["config"])
    climate = _climate_from_payload(payload["climate"])
    provider = build_provider(cfg)
    objective, lo, hi = make_objective(cfg.objective, climate, provider)
    runner = get_algorithm(payload["algorithm"])
    opt_conf = OptimiserConfig(
        algorithm=payload["algorithm"], budget=cfg.budget, repeats=1, seed=payload["seed"]
    )
    trace = runner(objective, (lo, hi), opt_conf)
    return {
        "algorithm": payload["algorithm"],
        "seed": payload["seed"],
        "best_values": [float(v) for v in trace.best_values],
        "best_point": [float(v) for v in trace.best_point],
        "best_value": float(trace.best_value),
        "evaluations": int(trace.evaluations),
        "wall_time": float(trace.wall_time),
    }


def _user_sign(objective: str) -> float:
    """Internal values always minimise; power campaigns report the positive
    (maximised) power, the cost proxy is reported as-is."""
    return -1.0 if objective == "power" else 1.0


def _write_trace_csv(path: Path, best_values, sign: float) -> None:
    with open(path, "w") as fh:
        fh.write("evaluation_index,best_value\n")
        for i, v in enumerate(best_values, start=1):
            fh.write(f"{i},{sign * float(v)!r}\n")


def _quartiles(values) -> dict:
    qs = np.percentile(np.asarray(values, dtype=float), [0, 25, 50, 75, 100])
    return {
        "min": float(qs[0]),
        "q1": float(qs[1]),
        "median": float(qs[2]),
        "q3": float(qs[3]),
        "max": float(qs[4]),
    }


def _design_payload(vector, n_states: int) -> dict:
    design = decode(np.asarray(vector, dtype=float), n_states)
    return {
        "radius": design.radius,
        "aspect_ratio": design.aspect_ratio,
        "tether_inclination": design.tether_inclination,
        "attachment_angle": design.attachment_angle,
        "k_pto": [float(v) for v in design.k_pto],
        "b_pto": [float(v) for v in design.b_pto],
    }


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_evaluate(args) -> int:
    cfg = resolve_config(args)
    climate = load_climate(cfg.climate)
    provider = build_provider(cfg)
    n = len(climate)

    tokens = Path(args.design).read_text().split()
    try:
        values = np.array([float(t) for t in tokens])
    except ValueError:
        raise ParseError(f"{args.design}: design file must hold only numbers") from None
    expected = 4 + 2 * n
    if values.size != expected:
        raise BoundsError(
            f"{args.design}: expected {expected} values "
            f"(4 geometry + 2 x {n} PTO), got {values.size}"
        )
    # design files hold physical values (PTO in N/m and N s/m, not log space)
    design = DesignVector(
        radius=float(values[0]),
        aspect_ratio=float(values[1]),
        tether_inclination=float(values[2]),
        attachment_angle=float(values[3]),
        k_pto=values[4 : 4 + n],
        b_pto=values[4 + n :],
    )

    record = evaluate_design(design, climate, provider)

    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "evaluation.jsonl").write_text(record.to_json_line() + "\n")

    print(f"annual_average_power_w {record.p_aap:.6f}")
    print(f"lcoe_proxy {record.lcoe:.9g}")
    print(f"buoy_mass_kg {record.m_b:.6f}")
    print(f"anchoring_mass_kg {record.m_as:.6f}")
    print(f"peak_tether_force_n {record.peak_force:.6f}")
    print("state hs tp probability power_w converged")
    for k, (state, prob) in enumerate(zip(climate.states, climate.probabilities), start=1):
        print(
            f"{k} {state.hs:g} {state.tp:g} {prob:g} "
            f"{record.per_state_power[k - 1]:.6f} {'yes' if record.converged[k - 1] else 'no'}"
        )
    return EXIT_OK


def cmd_optimise(args) -> int:
    cfg = resolve_config(args)
    for tag in cfg.algorithms:
        if tag == HYBRID_TAG:
            raise ConfigError(
                f"{HYBRID_TAG!r} needs a frozen (radius, aspect) pair; use the sweep subcommand"
            )
    climate = load_climate(cfg.climate)
    payload_base = {"config": cfg.__dict__, "climate": _climate_payload(climate)}
    jobs = [
        {**payload_base, "algorithm": tag, "seed": cfg.seed + rep}
        for tag in cfg.algorithms
        for rep in range(cfg.repeats)
    ]

    results, failures = [], []
    if cfg.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = {pool.submit(_run_one, job): job for job in jobs}
            for fut in concurrent.futures.as_completed(futures):
                job = futures[fut]
                try:
                    results.append(fut.result())
                except Exception as exc:
                    failures.append(
                        {"algorithm": job["algorithm"], "seed": job["seed"], "error": str(exc)}
                    )
    else:
        for job in jobs:
            try:
                results.append(_run_one(job))
            except Exception as exc:
                failures.append(
                    {"algorithm": job["algorithm"], "seed": job["seed"], "error": str(exc)}
                )

    out_dir = Path(cfg.out)
    traces_dir = out_dir / "traces"
    summaries_dir = out_dir / "summaries"
    traces_dir.mkdir(parents=True, exist_ok=True)
    summaries_dir.mkdir(parents=True, exist_ok=True)

    sign = _user_sign(cfg.objective)
    n = len(climate)
    by_algo = {tag: [] for tag in cfg.algorithms}
    for res in results:
        by_algo[res["algorithm"]].append(res)

    for tag in cfg.algorithms:
        runs = sorted(by_algo[tag], key=lambda r: r["seed"])
        run_entries = []
        for res in runs:
            trace_name = f"{tag}_{cfg.objective}_s{res['seed']}.csv"
            _write_trace_csv(traces_dir / trace_name, res["best_values"], sign)
            run_entries.append(
                {
                    "seed": res["seed"],
                    "best_value": sign * res["best_value"],
                    "evaluations": res["evaluations"],
                    "wall_time_s": res["wall_time"],
                    "trace": f"traces/{trace_name}",
                }
            )
        algo_failures = [f for f in failures if f["algorithm"] == tag]
        summary = {
            "algorithm": tag,
            "objective": cfg.objective,
            "budget": cfg.budget,
            "repeats": cfg.repeats,
            "runs": run_entries,
            "failed": algo_failures,
        }
        if run_entries:
            finals = [r["best_value"] for r in run_entries]
            summary["distribution"] = _quartiles(finals)
            best_run = min(runs, key=lambda r: r["best_value"])  # internal minimisation
            summary["best_design"] = _design_payload(best_run["best_point"], n)
            summary["best_design"]["objective_value"] = sign * best_run["best_value"]
        with open(summaries_dir / f"{tag}_{cfg.objective}.json", "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")

    done = len(results)
    print(f"completed {done}/{len(jobs)} runs, {len(failures)} failed, outputs in {out_dir}")
    return EXIT_OK if not failures else EXIT_PARTIAL


def cmd_sweep(args) -> int:
    cfg = resolve_config(args)
    climate = load_climate(cfg.climate)
    provider = build_provider(cfg)
    objective, lo, hi = make_objective(cfg.objective, climate, provider)

    opt_conf = OptimiserConfig(
        algorithm=HYBRID_TAG,
        budget=cfg.budget,
        repeats=1,
        seed=cfg.seed,
        params={"de_budget": cfg.de_budget, "nm_budget": cfg.nm_budget},
    )
    rows = sweep_grid(objective, (lo, hi), cfg.radius_grid, cfg.aspect_grid, opt_conf)

    out_dir = Path(cfg.out) / "surfaces"
    out_dir.mkdir(parents=True, exist_ok=True)
    sign = _user_sign(cfg.objective)
    path = out_dir / f"sweep_{cfg.objective}.csv"
    failures = 0
    with open(path, "w") as fh:
        fh.write("a,aspect,objective_value,converged\n")
        for row in rows:
            value = sign * row["objective_value"] if row["converged"] else float("nan")
            fh.write(f"{row['a']:g},{row['aspect']:g},{value!r},{str(row['converged']).lower()}\n")
            if not row["converged"]:
                failures += 1
    print(f"swept {len(rows)} nodes, {failures} failed, surface in {path}")
    return EXIT_OK if failures == 0 else EXIT_PARTIAL


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common_flags(sub):
    sub.add_argument("--config", help="JSON config file; flags override its entries")
    sub.add_argument("--objective", choices=["power", "lcoe"], help="objective to optimise")
    sub.add_argument("--algo", help="comma-separated algorithm tags")
    sub.add_argument("--budget", type=int, help="objective evaluations per run")
    sub.add_argument("--repeats", type=int, help="independent seeded repeats per algorithm")
    sub.add_argument("--seed", type=int, help="base RNG seed; repeat i uses seed+i")
    sub.add_argument("--climate", help="climate CSV (header hs,tp,probability)")
    sub.add_argument(
        "--hydro",
        help="'analytic' (default) or path to a coefficient table "
        "(table coefficients are geometry-independent)",
    )
    sub.add_argument("--jobs", type=int, help="parallel worker processes")
    sub.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wecopt",
        description="Simulate and optimise a submerged three-tether wave energy converter.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_eval = subs.add_parser("evaluate", help="score one design file against a climate")
    p_eval.add_argument("design", help="text file with 4 + 2N whitespace-separated values")
    _add_common_flags(p_eval)

    p_opt = subs.add_parser(
        "optimise", aliases=["optimize"], help="run seeded optimisation campaigns"
    )
    _add_common_flags(p_opt)

    p_sweep = subs.add_parser(
        "sweep", help="hybrid-optimise over a (radius, aspect) grid and emit the surface"
    )
    _add_common_flags(p_sweep)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"evaluate": cmd_evaluate, "optimise": cmd_optimise, "optimize": cmd_optimise,
                "sweep": cmd_sweep}
    try:
        return handlers[args.command](args)
    except (ConfigError, ParseError, BoundsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
