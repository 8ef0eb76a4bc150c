"""Wave spectra, viscous drag and hydrodynamic coefficients.

Two coefficient backends are provided behind the same small provider
interface: :class:`AnalyticHydro` evaluates documented closed-form
approximations for any cylinder geometry, and :class:`TableHydro` serves
externally computed coefficients from a plain-text table.  The analytic
backend is an approximation by design: excitation is Froude-Krylov only
(incident-wave pressure integrated over the hull) and radiation damping is
tied to the excitation through the classical maximum-capture-width relation
for axisymmetric bodies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import j1, jv

from .errors import GeometryError, ParseError
from .geometry import WecGeometry

NDOF = 6


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing angular frequencies, rad/s."""

    omegas: np.ndarray

    def __post_init__(self):
        om = np.asarray(self.omegas, dtype=float)
        if om.ndim != 1 or om.size < 2:
            raise ValueError("frequency grid needs at least 2 points")
        if np.any(om <= 0):
            raise ValueError("frequencies must be positive")
        if np.any(np.diff(om) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        object.__setattr__(self, "omegas", _readonly(om))

    def __len__(self) -> int:
        return self.omegas.size

    @classmethod
    def uniform(cls, w_min: float = 0.1, w_max: float = 3.0, n: int = 60) -> "FrequencyGrid":
        return cls(np.linspace(w_min, w_max, n))


def default_grid() -> FrequencyGrid:
    """60 points uniform on [0.1, 3.0] rad/s; covers peak periods from ~2 to ~63 s."""
    return FrequencyGrid.uniform(0.1, 3.0, 60)


@dataclass(frozen=True)
class SeaState:
    """One stationary sea condition (significant wave height, peak period)."""

    hs: float
    tp: float

    def __post_init__(self):
        if self.hs <= 0:
            raise ValueError(f"significant wave height must be positive, got {self.hs}")
        if self.tp <= 0:
            raise ValueError(f"peak period must be positive, got {self.tp}")

    @property
    def omega_p(self) -> float:
        """Peak angular frequency 2*pi/Tp, rad/s."""
        return 2.0 * math.pi / self.tp


def pm_spectrum(sea: SeaState, omega) -> np.ndarray | float:
    """One-sided Pierson-Moskowitz elevation spectrum S(omega), m^2 s.

    S(w) = (5/16) Hs^2 wp^4 w^-5 exp(-1.25 (wp/w)^4), with wp = 2*pi/Tp.
    Integrates to Hs^2/16, i.e. Hs = 4 sqrt(m0).
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise ValueError("omega must be positive")
    wp = sea.omega_p
    coef = (5.0 / 16.0) * sea.hs**2 * wp**4
    # evaluated in log space so the w -> 0 limit underflows to 0 instead of 0*inf
    with np.errstate(over="ignore", divide="ignore"):
        s = coef * np.exp(-5.0 * np.log(w) - 1.25 * (wp / w) ** 4)
    s = np.where(np.isfinite(s), s, 0.0)
    return s if s.ndim else float(s)


def heave_drag_coefficient(aspect_ratio: float) -> float:
    """Heave drag coefficient of a cylinder in axial flow vs. aspect ratio H/a.

    Linear fit Cd3 = -0.12 (H/a) + 1.2, clamped below at zero.
    """
    if aspect_ratio < 0:
        raise ValueError(f"aspect ratio must be non-negative, got {aspect_ratio}")
    return max(0.0, -0.12 * aspect_ratio + 1.2)


@dataclass(frozen=True)
class DragModel:
    """Quadratic drag coefficients and reference areas per degree of freedom.

    Translational entries are projected areas (m^2).  Rotational entries are
    area-moments (m^5): projected area times the cube of the half-height
    moment arm, so that 0.5*rho*Cd*Ad*|w|*w has units of a moment.
    """

    cd: np.ndarray
    areas: np.ndarray

    def __post_init__(self):
        cd = np.asarray(self.cd, dtype=float)
        ad = np.asarray(self.areas, dtype=float)
        if cd.shape != (NDOF,) or ad.shape != (NDOF,):
            raise ValueError("drag model needs 6 coefficients and 6 areas")
        if np.any(cd < 0) or np.any(ad < 0):
            raise ValueError("drag coefficients and areas must be non-negative")
        object.__setattr__(self, "cd", _readonly(cd))
        object.__setattr__(self, "areas", _readonly(ad))

    @classmethod
    def zero(cls) -> "DragModel":
        return cls(np.zeros(NDOF), np.zeros(NDOF))


def build_drag_model(geom: WecGeometry) -> DragModel:
    """Drag model for a cylinder: fixed lateral/rotational coefficients,
    aspect-ratio-dependent heave coefficient, zero yaw drag (axisymmetric hull).
    """
    a, h = geom.radius, geom.height
    cd = np.array([1.0, 1.0, heave_drag_coefficient(geom.aspect_ratio), 0.2, 0.2, 0.0])
    lateral = 2.0 * a * h  # projected rectangle
    rotational = lateral * (0.5 * h) ** 3  # projected area x moment-arm^3
    areas = np.array([lateral, lateral, math.pi * a**2, rotational, rotational, 0.0])
    return DragModel(cd, areas)


def wavenumber(omega, depth: float):
    """Solve the finite-depth dispersion relation w^2 = g k tanh(k h) for k.

    Newton iteration from the deep-water guess; residual is driven below
    1e-12 * w^2 (well inside the 1e-10 contract).
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise ValueError("omega must be positive")
    if depth <= 0:
        raise ValueError("depth must be positive")
    g = 9.81
    w2 = w * w
    k = np.maximum(w2 / g, 1e-12)  # deep-water start
    for _ in range(100):
        kh = k * depth
        t = np.tanh(kh)
        f = g * k * t - w2
        if np.all(np.abs(f) < 1e-12 * w2):
            break
        fp = g * t + g * kh * (1.0 - t * t)
        k = k - f / fp
    return k if k.ndim else float(k)


@dataclass(frozen=True)
class HydroCoefficients:
    """Frequency-gridded added mass, radiation damping and excitation.

    ``added_mass`` and ``radiation_damping`` are (nw, 6, 6) real arrays,
    ``excitation`` is an (nw, 6) complex array of force/moment coefficients
    per unit incident wave amplitude.
    """

    grid: FrequencyGrid
    added_mass: np.ndarray
    radiation_damping: np.ndarray
    excitation: np.ndarray
    symmetry_tol: float = field(default=1e-6, repr=False)

    def __post_init__(self):
        nw = len(self.grid)
        am = np.asarray(self.added_mass, dtype=float)
        rd = np.asarray(self.radiation_damping, dtype=float)
        ex = np.asarray(self.excitation, dtype=complex)
        if am.shape != (nw, NDOF, NDOF) or rd.shape != (nw, NDOF, NDOF):
            raise ValueError("added mass / radiation damping must be (nw, 6, 6)")
        if ex.shape != (nw, NDOF):
            raise ValueError("excitation must be (nw, 6)")
        for name, arr in (("added mass", am), ("radiation damping", rd), ("excitation", ex)):
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} contains non-finite entries")
        for name, arr in (("added mass", am), ("radiation damping", rd)):
            scale = np.maximum(np.abs(arr).max(axis=(1, 2), keepdims=True), 1.0)
            if np.any(np.abs(arr - arr.transpose(0, 2, 1)) > self.symmetry_tol * scale):
                raise ValueError(f"{name} matrix is not symmetric within tolerance")
        if np.any(np.diagonal(rd, axis1=1, axis2=2) < -self.symmetry_tol):
            raise ValueError("radiation damping diagonal must be non-negative")
        # store exactly symmetrised copies
        object.__setattr__(self, "added_mass", _readonly(0.5 * (am + am.transpose(0, 2, 1))))
        rd_sym = 0.5 * (rd + rd.transpose(0, 2, 1))
        di = np.arange(NDOF)
        rd_sym[:, di, di] = np.maximum(rd_sym[:, di, di], 0.0)
        object.__setattr__(self, "radiation_damping", _readonly(rd_sym))
        object.__setattr__(self, "excitation", _readonly(ex))

    def interpolated(self, grid: FrequencyGrid) -> "HydroCoefficients":
        """Linear interpolation onto ``grid``; queries outside the tabulated
        range are clamped to the endpoint values."""
        src = self.grid.omegas
        dst = grid.omegas

        def interp(arr):
            flat = arr.reshape(len(src), -1)
            out = np.empty((len(dst), flat.shape[1]), dtype=arr.dtype)
            for j in range(flat.shape[1]):
                if np.iscomplexobj(arr):
                    out[:, j] = np.interp(dst, src, flat[:, j].real) + 1j * np.interp(
                        dst, src, flat[:, j].imag
                    )
                else:
                    out[:, j] = np.interp(dst, src, flat[:, j])
            return out.reshape((len(dst),) + arr.shape[1:])

        return HydroCoefficients(
            grid,
            interp(self.added_mass),
            interp(self.radiation_damping),
            interp(self.excitation),
        )


def _cosh_ratio(k: np.ndarray, z: float, h: float) -> np.ndarray:
    """cosh(k(z+h))/cosh(kh), evaluated overflow-free for z <= 0."""
    return np.exp(k * z) * (1.0 + np.exp(-2.0 * k * (z + h))) / (1.0 + np.exp(-2.0 * k * h))


def _sinh_ratio(k: np.ndarray, z: float, h: float) -> np.ndarray:
    """sinh(k(z+h))/cosh(kh), evaluated overflow-free for z <= 0."""
    return np.exp(k * z) * (1.0 - np.exp(-2.0 * k * (z + h))) / (1.0 + np.exp(-2.0 * k * h))


def froude_krylov_excitation(geom: WecGeometry, grid: FrequencyGrid) -> np.ndarray:
    """Froude-Krylov excitation coefficients (nw, 6), complex, per unit amplitude.

    Incident elevation Re{A exp(i(w t - k x))} travelling along +x; dynamic
    pressure rho g A cosh(k(z+h))/cosh(kh) integrated over the hull.  Only
    surge, heave and pitch are excited (unidirectional waves, axisymmetric
    hull); the surface-disc integrals reduce to Bessel functions J1, J2.
    """
    rho, g = geom.water_density, geom.gravity
    a, h = geom.radius, geom.depth
    z_top = -geom.submergence
    z_bot = -(geom.submergence + geom.height)

    w = grid.omegas
    k = np.asarray(wavenumber(w, h))
    ka = k * a

    rc_top = _cosh_ratio(k, z_top, h)
    rc_bot = _cosh_ratio(k, z_bot, h)
    rs_top = _sinh_ratio(k, z_top, h)
    rs_bot = _sinh_ratio(k, z_bot, h)

    # integral of cosh-ratio over the wetted height, and its first moment
    # about the centroid (integration of the pressure profile along z)
    int_c = (rs_top - rs_bot) / k
    half = 0.5 * geom.height
    int_zc = (half * rs_top + half * rs_bot) / k - (rc_top - rc_bot) / k**2

    lam0 = 2.0 * j1(ka) / ka  # disc average of exp(-i k x)

    f_surge = 2.0j * math.pi * rho * g * a * j1(ka) * int_c
    f_heave = rho * g * math.pi * a**2 * lam0 * (rc_bot - rc_top)
    f_pitch = (
        2.0j
        * math.pi
        * rho
        * g
        * a
        * (j1(ka) * int_zc + a * jv(2, ka) * (rc_bot - rc_top) / k)
    )

    exc = np.zeros((len(grid), NDOF), dtype=complex)
    exc[:, 0] = f_surge
    exc[:, 2] = f_heave
    exc[:, 4] = f_pitch
    return exc


def analytic_hydro(geom: WecGeometry, grid: FrequencyGrid) -> HydroCoefficients:
    """Closed-form approximate hydrodynamic coefficients for a submerged cylinder.

    Added mass (frequency-independent, diagonal):
      * surge/sway: rho V (transverse cylinder coefficient Ca = 1);
      * heave: (8/3) rho a^3, the flat-end (disc) value, i.e.
        Ca3 = 8 / (3 pi (H/a)) when normalised by rho V;
      * roll/pitch: displaced-fluid inertia rho V (3 a^2 + H^2)/12;
      * yaw: zero (body of revolution).

    Radiation damping (diagonal, non-negative): tied to the Froude-Krylov
    excitation through the axisymmetric maximum-capture-width relation,
    B = kappa k |f|^2 / (rho g cg), kappa = 1/4 for the heave (monopole)
    mode and 1/8 for the surge/sway/roll/pitch (dipole) modes.

    Excitation: Froude-Krylov pressure integration, see
    :func:`froude_krylov_excitation`.
    """
    if geom.submergence <= 0 or geom.submergence + geom.height >= geom.depth:
        raise GeometryError("buoy must be fully submerged and clear of the floor")

    rho, g = geom.water_density, geom.gravity
    vol = geom.displaced_volume
    a, hgt = geom.radius, geom.height
    nw = len(grid)
    w = grid.omegas
    k = np.asarray(wavenumber(w, geom.depth))
    kh = k * geom.depth
    cg = 0.5 * (w / k) * (1.0 + 2.0 * kh / np.sinh(2.0 * kh))

    exc = froude_krylov_excitation(geom, grid)

    ca_diag = np.array(
        [
            rho * vol,
            rho * vol,
            (8.0 / 3.0) * rho * a**3,
            rho * vol * (3.0 * a**2 + hgt**2) / 12.0,
            rho * vol * (3.0 * a**2 + hgt**2) / 12.0,
            0.0,
        ]
    )
    added_mass = np.zeros((nw, NDOF, NDOF))
    added_mass[:, np.arange(NDOF), np.arange(NDOF)] = ca_diag

    kappa = np.array([0.125, 0.125, 0.25, 0.125, 0.125, 0.0])
    f2 = np.abs(exc) ** 2
    f2[:, 1] = f2[:, 0]  # sway mirrors surge (axisymmetric hull)
    f2[:, 3] = f2[:, 4]  # roll mirrors pitch
    b_diag = kappa[None, :] * k[:, None] * f2 / (rho * g * cg[:, None])
    radiation = np.zeros((nw, NDOF, NDOF))
    radiation[:, np.arange(NDOF), np.arange(NDOF)] = b_diag

    return HydroCoefficients(grid, added_mass, radiation, exc)


# ---------------------------------------------------------------------------
# table file backend
#
# Plain text, '#' comments.  One block per frequency:
#   omega <value>
#   6 rows x 6 columns of added mass
#   6 rows x 6 columns of radiation damping
#   6 lines of "re im" excitation pairs
# Whitespace separated, SI units.
# ---------------------------------------------------------------------------


def save_hydro_table(coeffs: HydroCoefficients, path) -> None:
    """Write coefficients in the plain-text block format (17 significant digits,
    so a read-back reproduces the arrays to double precision)."""
    with open(path, "w") as fh:
        fh.write("# hydrodynamic coefficient table\n")
        fh.write("# omega block: 6x6 added mass, 6x6 radiation damping, 6 x (re im) excitation\n")
        for i, w in enumerate(coeffs.grid.omegas):
            fh.write(f"omega {float(w)!r}\n")
            for row in coeffs.added_mass[i]:
                fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
            for row in coeffs.radiation_damping[i]:
                fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
            for v in coeffs.excitation[i]:
                fh.write(f"{v.real:.17g} {v.imag:.17g}\n")


def load_hydro_table(path) -> HydroCoefficients:
    """Parse a coefficient table; raises :class:`ParseError` naming the
    offending line on malformed input."""
    tokens = []  # (line_number, [fields])
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if body:
                tokens.append((lineno, body.split()))

    omegas, am_blocks, rd_blocks, ex_blocks = [], [], [], []
    i = 0

    def take(expect_fields, what):
        nonlocal i
        if i >= len(tokens):
            raise ParseError(f"{path}: unexpected end of file while reading {what}")
        lineno, fields = tokens[i]
        i += 1
        if len(fields) != expect_fields:
            raise ParseError(
                f"{path}, line {lineno}: expected {expect_fields} fields for {what}, "
                f"got {len(fields)}"
            )
        return lineno, fields

    while i < len(tokens):
        lineno, fields = take(2, "omega header")
        if fields[0] != "omega":
            raise ParseError(f"{path}, line {lineno}: expected 'omega <value>', got {fields[0]!r}")
        try:
            w = float(fields[1])
        except ValueError as exc:
            raise ParseError(f"{path}, line {lineno}: bad omega value {fields[1]!r}") from exc
        if w <= 0:
            raise ParseError(f"{path}, line {lineno}: omega must be positive")
        if omegas and w <= omegas[-1]:
            raise ParseError(f"{path}, line {lineno}: frequency column must be strictly increasing")
        omegas.append(w)

        def read_matrix(what):
            rows = []
            for _ in range(NDOF):
                ln, fl = take(NDOF, what)
                try:
                    rows.append([float(v) for v in fl])
                except ValueError as exc:
                    raise ParseError(f"{path}, line {ln}: bad number in {what}") from exc
            return np.array(rows)

        am = read_matrix("added mass row")
        rd = read_matrix("radiation damping row")
        ex = np.empty(NDOF, dtype=complex)
        for dof in range(NDOF):
            ln, fl = take(2, "excitation pair")
            try:
                ex[dof] = complex(float(fl[0]), float(fl[1]))
            except ValueError as exc:
                raise ParseError(f"{path}, line {ln}: bad excitation pair") from exc
        for name, mat in (("added mass", am), ("radiation damping", rd)):
            scale = max(np.abs(mat).max(), 1.0)
            if np.abs(mat - mat.T).max() > 1e-6 * scale:
                raise ParseError(
                    f"{path}: {name} block at omega={w} is asymmetric beyond tolerance"
                )
        am_blocks.append(am)
        rd_blocks.append(rd)
        ex_blocks.append(ex)

    if not omegas:
        raise ParseError(f"{path}: no frequency blocks found")
    if len(omegas) < 2:
        raise ParseError(f"{path}: need at least two frequency blocks")
    try:
        return HydroCoefficients(
            FrequencyGrid(np.array(omegas)),
            np.array(am_blocks),
            np.array(rd_blocks),
            np.array(ex_blocks),
        )
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from exc


class AnalyticHydro:
    """Coefficient provider that recomputes the closed-form approximation
    for every geometry it is asked about."""

    def __init__(self, grid: FrequencyGrid | None = None):
        self.grid = grid if grid is not None else default_grid()

    def coefficients(self, geom: WecGeometry) -> HydroCoefficients:
        return analytic_hydro(geom, self.grid)


class TableHydro:
    """Coefficient provider backed by an imported table.

    The table represents one externally analysed hull, so the returned
    coefficients do not vary with the requested geometry; use the analytic
    backend for geometry optimisation.
    """

    def __init__(self, table: HydroCoefficients, grid: FrequencyGrid | None = None):
        self.table = table if grid is None else table.interpolated(grid)
        self.grid = self.table.grid

    @classmethod
    def from_file(cls, path, grid: FrequencyGrid | None = None) -> "TableHydro":
        return cls(load_hydro_table(path), grid=grid)

    def coefficients(self, geom: WecGeometry) -> HydroCoefficients:
        return self.table
