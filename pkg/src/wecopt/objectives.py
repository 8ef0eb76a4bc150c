"""Wave climate ingestion, design-vector handling and the two objectives.

The design space couples four geometric parameters with one PTO stiffness
and one PTO damping per sea state, so a climate of N states gives 4 + 2N
decision variables (72 for the 34-state reference climate).  Objective one
is annual average power, the occurrence-weighted mean absorbed power over
the climate; objective two is an inverse cost-effectiveness proxy built
from yearly energy per unit of significant mass.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import PtoSetting, solve_spectral, solve_spectral_batch, tether_force_stats
from .errors import BoundsError, ParseError
from .geometry import WecGeometry
from .hydro import SeaState, build_drag_model

RADIUS_BOUNDS = (5.0, 20.0)
ASPECT_BOUNDS = (0.4, 1.5)
TETHER_ANGLE_BOUNDS = (10.0, 80.0)
ATTACH_ANGLE_BOUNDS = (10.0, 80.0)
PTO_BOUNDS = (1e3, 1e8)
LOG_PTO_BOUNDS = (math.log10(PTO_BOUNDS[0]), math.log10(PTO_BOUNDS[1]))

# anchoring mass per newton of peak tether load, from the reference design
# (225 t of anchoring sized for a 1.94 MN peak force)
ANCHOR_MASS_REF = 225e3
PEAK_FORCE_REF = 1.94e6
ANCHOR_MASS_PER_NEWTON = ANCHOR_MASS_REF / PEAK_FORCE_REF

HOURS_PER_YEAR = 8760.0
PROBABILITY_SUM_TOL = 1e-9


@dataclass(frozen=True)
class WaveClimate:
    """Sea states with occurrence probabilities; row order is meaningful
    because PTO vector index k binds to state k."""

    states: tuple
    probabilities: tuple
    site: str = ""

    def __post_init__(self):
        if len(self.states) == 0:
            raise ValueError("climate needs at least one sea state")
        if len(self.states) != len(self.probabilities):
            raise ValueError("one probability per sea state required")
        probs = np.asarray(self.probabilities, dtype=float)
        if np.any(probs < 0):
            raise ValueError("occurrence probabilities must be non-negative")
        if probs.sum() > 1.0 + PROBABILITY_SUM_TOL:
            raise ValueError(f"occurrence probabilities sum to {probs.sum():.6g} > 1")
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "probabilities", tuple(float(p) for p in probs))

    def __len__(self) -> int:
        return len(self.states)


def load_climate(path, site: str = "") -> WaveClimate:
    """Read a climate CSV with header ``hs,tp,probability``.

    Rows are kept in file order.  Malformed numbers, negative probabilities,
    duplicate (hs, tp) pairs and a probability sum above 1 raise
    :class:`ParseError` naming the offending row.
    """
    states, probs, seen = [], [], {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty climate file") from None
        if [c.strip().lower() for c in header] != ["hs", "tp", "probability"]:
            raise ParseError(f"{path}: expected header 'hs,tp,probability', got {','.join(header)!r}")
        for row_idx, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ParseError(f"{path}, row {row_idx}: expected 3 columns, got {len(row)}")
            try:
                hs, tp, p = (float(c) for c in row)
            except ValueError:
                raise ParseError(f"{path}, row {row_idx}: non-numeric value in {row!r}") from None
            if p < 0:
                raise ParseError(f"{path}, row {row_idx}: negative probability {p}")
            if (hs, tp) in seen:
                raise ParseError(
                    f"{path}, row {row_idx}: duplicate sea state (hs={hs}, tp={tp}), "
                    f"first seen at row {seen[(hs, tp)]}"
                )
            seen[(hs, tp)] = row_idx
            try:
                states.append(SeaState(hs=hs, tp=tp))
            except ValueError as exc:
                raise ParseError(f"{path}, row {row_idx}: {exc}") from None
            probs.append(p)
    if not states:
        raise ParseError(f"{path}: no data rows")
    total = sum(probs)
    if total > 1.0 + PROBABILITY_SUM_TOL:
        raise ParseError(f"{path}: probabilities sum to {total:.6g}, exceeding 1")
    return WaveClimate(states=tuple(states), probabilities=tuple(probs), site=site)


@dataclass(frozen=True)
class DesignVector:
    """One candidate converter design.

    Geometric part: radius a, aspect ratio H/a and the two tether angles.
    Control part: one (stiffness, damping) PTO pair per climate state.
    """

    radius: float
    aspect_ratio: float
    tether_inclination: float
    attachment_angle: float
    k_pto: np.ndarray
    b_pto: np.ndarray

    def __post_init__(self):
        k = np.atleast_1d(np.asarray(self.k_pto, dtype=float))
        b = np.atleast_1d(np.asarray(self.b_pto, dtype=float))
        if k.shape != b.shape or k.ndim != 1:
            raise BoundsError("k_pto and b_pto must be 1-D arrays of equal length")
        object.__setattr__(self, "k_pto", k)
        object.__setattr__(self, "b_pto", b)
        checks = [
            ("radius", self.radius, RADIUS_BOUNDS),
            ("aspect_ratio", self.aspect_ratio, ASPECT_BOUNDS),
            ("tether_inclination", self.tether_inclination, TETHER_ANGLE_BOUNDS),
            ("attachment_angle", self.attachment_angle, ATTACH_ANGLE_BOUNDS),
        ]
        for name, value, (lo, hi) in checks:
            if not (lo <= value <= hi):
                raise BoundsError(f"{name} = {value} outside [{lo}, {hi}]")
        for name, arr in (("k_pto", k), ("b_pto", b)):
            if np.any(arr < PTO_BOUNDS[0]) or np.any(arr > PTO_BOUNDS[1]):
                raise BoundsError(f"{name} entries must lie in [{PTO_BOUNDS[0]:g}, {PTO_BOUNDS[1]:g}]")

    @property
    def n_states(self) -> int:
        return self.k_pto.size

    @property
    def height(self) -> float:
        return self.radius * self.aspect_ratio

    def geometry(self) -> WecGeometry:
        return WecGeometry(
            radius=self.radius,
            height=self.height,
            tether_inclination=self.tether_inclination,
            attachment_angle=self.attachment_angle,
        )

    def pto(self, state_index: int) -> PtoSetting:
        return PtoSetting(k_pto=float(self.k_pto[state_index]), b_pto=float(self.b_pto[state_index]))


def design_bounds(n_states: int) -> tuple[np.ndarray, np.ndarray]:
    """Search-space box for a climate of ``n_states``: geometric entries are
    linear, PTO entries are log10 of the physical values."""
    lo = np.concatenate(
        [
            [RADIUS_BOUNDS[0], ASPECT_BOUNDS[0], TETHER_ANGLE_BOUNDS[0], ATTACH_ANGLE_BOUNDS[0]],
            np.full(2 * n_states, LOG_PTO_BOUNDS[0]),
        ]
    )
    hi = np.concatenate(
        [
            [RADIUS_BOUNDS[1], ASPECT_BOUNDS[1], TETHER_ANGLE_BOUNDS[1], ATTACH_ANGLE_BOUNDS[1]],
            np.full(2 * n_states, LOG_PTO_BOUNDS[1]),
        ]
    )
    return lo, hi


def encode(design: DesignVector) -> np.ndarray:
    """Design to search coordinates: [a, H/a, alpha_t, alpha_ap,
    log10 k_1..k_N, log10 b_1..b_N]."""
    return np.concatenate(
        [
            [design.radius, design.aspect_ratio, design.tether_inclination, design.attachment_angle],
            np.log10(design.k_pto),
            np.log10(design.b_pto),
        ]
    )


def decode(vector, n_states: int) -> DesignVector:
    """Search coordinates back to a design; PTO entries are exponentiated and
    nudged onto the physical bounds to absorb log/exp round-off."""
    v = np.asarray(vector, dtype=float)
    if v.shape != (4 + 2 * n_states,):
        raise BoundsError(f"expected design vector of length {4 + 2 * n_states}, got {v.shape}")
    k = np.clip(10.0 ** v[4 : 4 + n_states], *PTO_BOUNDS)
    b = np.clip(10.0 ** v[4 + n_states :], *PTO_BOUNDS)
    return DesignVector(
        radius=float(v[0]),
        aspect_ratio=float(v[1]),
        tether_inclination=float(v[2]),
        attachment_angle=float(v[3]),
        k_pto=k,
        b_pto=b,
    )


@dataclass(frozen=True)
class EvaluationRecord:
    """Everything the two objectives need from one design evaluation."""

    design: DesignVector
    p_aap: float
    lcoe: float
    m_b: float
    m_as: float
    peak_force: float
    per_state_power: np.ndarray
    converged: np.ndarray

    def to_json_line(self) -> str:
        """Stable-field-order single-line serialisation for evaluation logs."""
        payload = {
            "design": {
                "radius": self.design.radius,
                "aspect_ratio": self.design.aspect_ratio,
                "tether_inclination": self.design.tether_inclination,
                "attachment_angle": self.design.attachment_angle,
                "k_pto": [float(v) for v in self.design.k_pto],
                "b_pto": [float(v) for v in self.design.b_pto],
            },
            "p_aap_w": self.p_aap,
            "lcoe": self.lcoe,
            "m_b_kg": self.m_b,
            "m_as_kg": self.m_as,
            "peak_force_n": self.peak_force,
            "per_state_power_w": [float(v) for v in self.per_state_power],
            "converged": [bool(v) for v in self.converged],
        }
        return json.dumps(payload, sort_keys=False)


def evaluate_design(design: DesignVector, climate: WaveClimate, provider, batched: bool = True) -> EvaluationRecord:
    """Solve every climate state for ``design`` and assemble both objectives.

    Non-converged states contribute zero power and are skipped when sizing
    the anchors; if no state converges the peak force falls back to the
    static pretension and the record carries infinite LCoE.
    """
    if len(climate) != design.n_states:
        raise BoundsError(
            f"design holds {design.n_states} PTO pairs but climate has {len(climate)} states"
        )
    geom = design.geometry()
    hydro = provider.coefficients(geom)
    drag = build_drag_model(geom)
    ptos = [design.pto(k) for k in range(design.n_states)]

    if batched:
        responses = solve_spectral_batch(geom, hydro, drag, ptos, list(climate.states))
    else:
        responses = [
            solve_spectral(geom, hydro, drag, pto, sea)
            for pto, sea in zip(ptos, climate.states)
        ]

    converged = np.array([r.converged for r in responses], dtype=bool)
    power = np.array([r.power if r.converged else 0.0 for r in responses])
    p_aap = float(np.dot(np.asarray(climate.probabilities), power))

    peaks = [
        tether_force_stats(geom, resp, pto).peak_force
        for resp, pto in zip(responses, ptos)
        if resp.converged
    ]
    peak_force = max(peaks) if peaks else _static_pretension(geom)
    m_b = geom.buoy_mass
    m_as = ANCHOR_MASS_PER_NEWTON * peak_force

    return EvaluationRecord(
        design=design,
        p_aap=p_aap,
        lcoe=_lcoe_value(p_aap, m_b + m_as),
        m_b=m_b,
        m_as=m_as,
        peak_force=peak_force,
        per_state_power=power,
        converged=converged,
    )


def _static_pretension(geom: WecGeometry) -> float:
    return (
        0.5
        * geom.water_density
        * geom.gravity
        * geom.displaced_volume
        / (3.0 * math.cos(math.radians(geom.tether_inclination)))
    )


def _lcoe_value(p_aap_watts: float, significant_mass_kg: float) -> float:
    """Inverse cost-effectiveness proxy: (yearly MWh per kg) ** -0.5.

    Written as sqrt(mass / energy) so the power-of-two scaling identities
    (quadruple the energy, halve the value) hold bit-exactly: IEEE sqrt
    and division are correctly rounded, libm pow is not always.

    Zero power gives the +infinity sentinel so minimisers treat the design
    as worst-case instead of crashing."""
    if p_aap_watts <= 0.0:
        return math.inf
    energy_mwh = HOURS_PER_YEAR * (p_aap_watts / 1e6)
    return math.sqrt(significant_mass_kg / energy_mwh)


def annual_average_power(design: DesignVector, climate: WaveClimate, provider) -> EvaluationRecord:
    """Occurrence-weighted mean absorbed power, packaged with the full record."""
    return evaluate_design(design, climate, provider)


def significant_mass(design: DesignVector, climate: WaveClimate, provider) -> tuple[float, float]:
    """Buoy mass and anchoring mass (kg) for the worst climate state."""
    rec = evaluate_design(design, climate, provider)
    return rec.m_b, rec.m_as


def lcoe(design: DesignVector, climate: WaveClimate, provider) -> EvaluationRecord:
    """Cost proxy record; see :func:`evaluate_design`."""
    return evaluate_design(design, climate, provider)


def make_objective(tag: str, climate: WaveClimate, provider):
    """Scalar minimisation objective over search coordinates.

    ``power`` minimises the negated annual average power; ``lcoe`` minimises
    the cost proxy directly.  Returns (callable, lower bounds, upper bounds).
    """
    n = len(climate)
    lo, hi = design_bounds(n)
    if tag == "power":

        def objective(vector: np.ndarray) -> float:
            return -evaluate_design(decode(vector, n), climate, provider).p_aap

    elif tag == "lcoe":

        def objective(vector: np.ndarray) -> float:
            return evaluate_design(decode(vector, n), climate, provider).lcoe

    else:
        raise ValueError(f"unknown objective tag {tag!r}; use 'power' or 'lcoe'")
    return objective, lo, hi
