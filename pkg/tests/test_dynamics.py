"""Tether kinematics, the statistically linearised solver, and tension stats."""

import math

import numpy as np
import pytest

import wecopt.dynamics as dynamics
from conftest import random_geometry
from wecopt.errors import NumericalError
from wecopt.geometry import WecGeometry
from wecopt.hydro import (
    DragModel,
    FrequencyGrid,
    HydroCoefficients,
    SeaState,
    build_drag_model,
    pm_spectrum,
)
from wecopt.dynamics import (
    MAX_ITERATIONS,
    N_TETHERS,
    TETHER_AZIMUTHS_DEG,
    PtoSetting,
    SpectralResponse,
    inverse_jacobian,
    mass_matrix,
    pto_6dof_matrices,
    solve_spectral,
    solve_spectral_batch,
    tether_force_stats,
    tether_geometry,
)


# ---------------------------------------------------------------------------
# tether layout and Jacobian
# ---------------------------------------------------------------------------


def _rotation(theta):
    """Rodrigues rotation matrix for an axis-angle vector."""
    t = np.linalg.norm(theta)
    if t == 0.0:
        return np.eye(3)
    k = theta / t
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + math.sin(t) * kx + (1.0 - math.cos(t)) * (kx @ kx)


def test_tether_directions_are_unit_and_azimuths_match(reference_geometry):
    r, u = tether_geometry(reference_geometry)
    assert r.shape == (3, 3) and u.shape == (3, 3)
    assert np.allclose(np.linalg.norm(u, axis=1), 1.0, rtol=1e-14)
    # attachment azimuths 0/120/240 degrees
    az = np.degrees(np.arctan2(r[:, 1], r[:, 0])) % 360.0
    assert np.allclose(az, TETHER_AZIMUTHS_DEG, atol=1e-10)


def test_attachment_sits_on_cap_or_wall():
    # shallow angle: the ray from the centroid exits through the bottom cap
    g_cap = WecGeometry(radius=5.5, height=5.5, attachment_angle=10.0)
    r, _ = tether_geometry(g_cap)
    assert np.allclose(r[:, 2], -0.5 * g_cap.height, rtol=1e-12)
    # steep angle: it exits through the side wall at the cylinder radius
    g_wall = WecGeometry(radius=5.5, height=5.5, attachment_angle=80.0)
    r, _ = tether_geometry(g_wall)
    assert np.allclose(np.hypot(r[:, 0], r[:, 1]), g_wall.radius, rtol=1e-12)


def test_vertical_tethers_give_pure_heave_column():
    geom = WecGeometry(radius=8.0, height=6.0, tether_inclination=0.0, attachment_angle=30.0)
    jinv = inverse_jacobian(geom)
    assert np.array_equal(jinv[:, 2], np.ones(3))
    assert np.array_equal(jinv[:, 0], np.zeros(3))
    assert np.array_equal(jinv[:, 1], np.zeros(3))
    # vertical tethers cannot exert yaw moments
    assert np.array_equal(jinv[:, 5], np.zeros(3))


def test_matched_angles_decouple_rotation(reference_geometry):
    # with the tethers continuing the attachment rays (alpha_t == alpha_ap)
    # the moment arms r x u vanish and rotation does not stretch any tether
    jinv = inverse_jacobian(reference_geometry)
    assert np.allclose(jinv[:, 3:], 0.0, atol=1e-14)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_jacobian_matches_finite_difference(seed):
    geom = random_geometry(np.random.default_rng(seed))
    r, u = tether_geometry(geom)
    jinv = inverse_jacobian(geom)
    z_c = geom.centroid_z
    a_t = math.radians(geom.tether_inclination)

    # anchors on the sea floor along each tether line
    lengths = (z_c + r[:, 2] + geom.depth) / math.cos(a_t)
    anchors = r - lengths[:, None] * u
    assert np.allclose(z_c + anchors[:, 2], -geom.depth, rtol=1e-12)

    def tether_lengths(q):
        rot = _rotation(q[3:])
        att = q[:3] + r @ rot.T
        return np.linalg.norm(att - anchors, axis=1)

    eps = 1e-6
    for i in range(6):
        dq = np.zeros(6)
        dq[i] = eps
        fd = (tether_lengths(dq) - tether_lengths(-dq)) / (2.0 * eps)
        assert np.allclose(fd, jinv[:, i], rtol=1e-5, atol=1e-7 * np.abs(jinv).max())


def test_positive_rate_means_lengthening():
    # moving the buoy straight up must lengthen every tether
    geom = WecGeometry(radius=10.0, height=8.0, tether_inclination=30.0, attachment_angle=50.0)
    jinv = inverse_jacobian(geom)
    assert np.all(jinv[:, 2] > 0.0)


# ---------------------------------------------------------------------------
# inertia and PTO projection
# ---------------------------------------------------------------------------


def test_mass_matrix_reference_values(reference_geometry):
    m6 = mass_matrix(reference_geometry)
    assert np.allclose(m6, np.diag(np.diag(m6)))
    m = m6[0, 0]
    assert m == m6[1, 1] == m6[2, 2]
    assert m == pytest.approx(267874.77, rel=1e-6)
    a, h = reference_geometry.radius, reference_geometry.height
    assert m6[3, 3] == m6[4, 4] == pytest.approx(m * (3 * a**2 + h**2) / 12.0, rel=1e-14)
    assert m6[5, 5] == pytest.approx(0.5 * m * a**2, rel=1e-14)
    assert np.all(np.linalg.eigvalsh(m6) > 0.0)


def test_mass_scales_linearly_with_height():
    m1 = mass_matrix(WecGeometry(radius=6.0, height=4.0))[0, 0]
    m2 = mass_matrix(WecGeometry(radius=6.0, height=8.0))[0, 0]
    assert m2 == pytest.approx(2.0 * m1, rel=1e-14)


def test_pto_projection_vertical_tethers():
    geom = WecGeometry(radius=8.0, height=6.0, tether_inclination=0.0, attachment_angle=30.0)
    jinv = inverse_jacobian(geom)
    k6, b6 = pto_6dof_matrices(PtoSetting(k_pto=2.0e5, b_pto=7.0e4), jinv)
    # three unit heave columns stack to a factor of exactly three
    assert k6[2, 2] == 3.0 * 2.0e5
    assert b6[2, 2] == 3.0 * 7.0e4
    k0, b0 = pto_6dof_matrices(PtoSetting(0.0, 0.0), jinv)
    assert np.array_equal(k0, np.zeros((6, 6)))
    assert np.array_equal(b0, np.zeros((6, 6)))


def test_pto_projection_is_symmetric_psd(rng):
    jinv = rng.standard_normal((3, 6))
    k6, b6 = pto_6dof_matrices(PtoSetting(7.3e4, 1.1e5), jinv)
    for mat in (k6, b6):
        assert np.allclose(mat, mat.T, rtol=1e-14)
        vals = np.linalg.eigvalsh(mat)
        assert vals.min() >= -1e-9 * np.abs(vals).max()


def test_pto_setting_rejects_negative():
    with pytest.raises(ValueError, match="non-negative"):
        PtoSetting(k_pto=-1.0, b_pto=0.0)


# ---------------------------------------------------------------------------
# spectral solver
# ---------------------------------------------------------------------------

SEA = SeaState(hs=3.0, tp=8.0)
PTO = PtoSetting(k_pto=2.0e5, b_pto=1.5e5)


def test_zero_drag_single_pass_matches_direct_solution(reference_geometry, provider):
    geom = reference_geometry
    hydro = provider.coefficients(geom)
    resp = solve_spectral(geom, hydro, DragModel.zero(), PTO, SEA)
    assert resp.iterations == 1
    assert resp.converged
    assert np.array_equal(resp.b_eq, np.zeros(6))

    # direct frequency-domain reconstruction, solved per frequency
    w = hydro.grid.omegas
    s_eta = pm_spectrum(SEA, w)
    jinv = inverse_jacobian(geom)
    k6, b6 = pto_6dof_matrices(PTO, jinv)
    m6 = mass_matrix(geom)
    expected = np.empty((w.size, 6))
    for i, wi in enumerate(w):
        z = -wi**2 * (m6 + hydro.added_mass[i]) + 1j * wi * (
            hydro.radiation_damping[i] + b6
        ) + k6
        h = np.linalg.solve(z, np.eye(6))
        expected[i] = np.abs(h) ** 2 @ (s_eta[i] * np.abs(hydro.excitation[i]) ** 2)
    scale = expected.max()
    assert np.allclose(resp.psd_x, expected, rtol=1e-10, atol=1e-12 * scale)


def test_power_scales_with_wave_energy(reference_geometry, provider):
    # the zero-drag model is linear: doubling Hs exactly quadruples the power
    hydro = provider.coefficients(reference_geometry)
    r1 = solve_spectral(reference_geometry, hydro, DragModel.zero(), PTO, SeaState(3.0, 8.0))
    r2 = solve_spectral(reference_geometry, hydro, DragModel.zero(), PTO, SeaState(6.0, 8.0))
    assert r2.power == 4.0 * r1.power
    assert np.array_equal(r2.sigma_xdot, 2.0 * r1.sigma_xdot)


def test_drag_iteration_converges_and_is_self_consistent(reference_geometry, provider):
    geom = reference_geometry
    hydro = provider.coefficients(geom)
    drag = build_drag_model(geom)
    resp = solve_spectral(geom, hydro, drag, PTO, SEA)
    assert resp.converged
    assert 1 < resp.iterations < MAX_ITERATIONS
    # the reported linearised damping is exactly the update rule applied to
    # the reported velocity spread
    drag_scale = 0.5 * geom.water_density * drag.cd * drag.areas * math.sqrt(8.0 / math.pi)
    assert np.array_equal(resp.b_eq, drag_scale * resp.sigma_xdot)
    assert resp.power > 0.0


@pytest.mark.parametrize("seed", range(8))
def test_drag_never_increases_power(seed, provider):
    rng = np.random.default_rng(seed)
    geom = random_geometry(rng)
    hydro = provider.coefficients(geom)
    pto = PtoSetting(10.0 ** rng.uniform(3, 8), 10.0 ** rng.uniform(3, 8))
    sea = SeaState(rng.uniform(1.0, 5.0), rng.uniform(6.0, 12.0))
    p_ideal = solve_spectral(geom, hydro, DragModel.zero(), pto, sea).power
    p_drag = solve_spectral(geom, hydro, build_drag_model(geom), pto, sea).power
    assert p_drag <= p_ideal * (1.0 + 1e-12)


def test_mirror_symmetry_of_off_axis_tethers(reference_geometry, provider):
    # long-crested waves along x: the two tethers mirrored about the x-z
    # plane see statistically identical loading
    hydro = provider.coefficients(reference_geometry)
    resp = solve_spectral(
        reference_geometry, hydro, build_drag_model(reference_geometry), PTO, SEA
    )
    assert resp.sigma_q[1] == pytest.approx(resp.sigma_q[2], rel=1e-12)
    assert resp.sigma_qdot[1] == pytest.approx(resp.sigma_qdot[2], rel=1e-12)


def test_batch_solver_matches_sequential(reference_geometry, provider, toy_climate):
    geom = reference_geometry
    hydro = provider.coefficients(geom)
    drag = build_drag_model(geom)
    ptos = [PtoSetting(1.0e5, 5.0e4), PtoSetting(4.0e5, 2.0e5), PtoSetting(2.0e6, 8.0e5)]
    seas = list(toy_climate.states)
    batched = solve_spectral_batch(geom, hydro, drag, ptos, seas)
    for pto, sea, got in zip(ptos, seas, batched):
        ref = solve_spectral(geom, hydro, drag, pto, sea)
        assert got.power == ref.power
        assert got.iterations == ref.iterations
        assert got.converged == ref.converged
        assert np.array_equal(got.b_eq, ref.b_eq)
        assert np.array_equal(got.sigma_xdot, ref.sigma_xdot)
        assert np.array_equal(got.sigma_qdot, ref.sigma_qdot)
        assert np.array_equal(got.sigma_q, ref.sigma_q)
        assert np.array_equal(got.psd_x, ref.psd_x)


def test_batch_solver_checks_lengths(reference_geometry, provider):
    hydro = provider.coefficients(reference_geometry)
    with pytest.raises(ValueError, match="one PTO setting per sea state"):
        solve_spectral_batch(
            reference_geometry, hydro, DragModel.zero(), [PTO], [SEA, SEA]
        )


def test_singular_system_raises(reference_geometry):
    # vertical tethers leave yaw completely unrestrained; cancelling the yaw
    # inertia with the added mass makes that row of the system exactly zero
    geom = WecGeometry(
        radius=5.5, height=5.5, tether_inclination=0.0, attachment_angle=45.0
    )
    grid = FrequencyGrid(np.linspace(0.5, 2.5, 5))
    i_yaw = mass_matrix(geom)[5, 5]
    added = np.zeros((5, 6, 6))
    added[:, 5, 5] = -i_yaw
    hydro = HydroCoefficients(
        grid, added, np.zeros((5, 6, 6)), np.zeros((5, 6), dtype=complex)
    )
    with pytest.raises(NumericalError, match="singular response matrix"):
        solve_spectral(geom, hydro, DragModel.zero(), PTO, SEA)


def test_non_convergence_is_flagged_not_raised(
    reference_geometry, provider, monkeypatch
):
    monkeypatch.setattr(dynamics, "MAX_ITERATIONS", 1)
    hydro = provider.coefficients(reference_geometry)
    drag = build_drag_model(reference_geometry)
    resp = dynamics.solve_spectral(reference_geometry, hydro, drag, PTO, SeaState(5.0, 10.0))
    assert resp.iterations == 1
    assert not resp.converged
    assert math.isfinite(resp.power) and resp.power >= 0.0


# ---------------------------------------------------------------------------
# tether force statistics
# ---------------------------------------------------------------------------


def _still_water_response():
    return SpectralResponse(
        b_eq=np.zeros(6),
        sigma_xdot=np.zeros(6),
        sigma_qdot=np.zeros(3),
        sigma_q=np.zeros(3),
        power=0.0,
        iterations=1,
        converged=True,
    )


def test_pretension_reference_value(reference_geometry):
    stats = tether_force_stats(reference_geometry, _still_water_response(), PTO)
    assert stats.sigma_ft == 0.0
    assert stats.peak_force == stats.pretension
    assert stats.pretension == pytest.approx(1238781.07, abs=0.02)


def test_pretension_grows_with_inclination():
    base = dict(radius=5.5, height=5.5, attachment_angle=45.0)
    resp = _still_water_response()
    t0 = tether_force_stats(WecGeometry(tether_inclination=0.0, **base), resp, PTO)
    t60 = tether_force_stats(WecGeometry(tether_inclination=60.0, **base), resp, PTO)
    assert t60.pretension == pytest.approx(2.0 * t0.pretension, rel=1e-12)


def test_tension_spread_scales_with_wave_height(reference_geometry, provider):
    hydro = provider.coefficients(reference_geometry)
    r1 = solve_spectral(reference_geometry, hydro, DragModel.zero(), PTO, SeaState(2.0, 9.0))
    r2 = solve_spectral(reference_geometry, hydro, DragModel.zero(), PTO, SeaState(4.0, 9.0))
    s1 = tether_force_stats(reference_geometry, r1, PTO)
    s2 = tether_force_stats(reference_geometry, r2, PTO)
    assert s2.sigma_ft == pytest.approx(2.0 * s1.sigma_ft, rel=1e-12)
    assert s1.pretension == s2.pretension
    assert s2.peak_force == pytest.approx(s2.pretension + 2.57 * s2.sigma_ft, rel=1e-14)


def test_worst_tether_drives_the_peak(reference_geometry):
    resp = SpectralResponse(
        b_eq=np.zeros(6),
        sigma_xdot=np.zeros(6),
        sigma_qdot=np.array([0.1, 0.3, 0.2]),
        sigma_q=np.array([0.5, 2.0, 1.0]),
        power=1.0,
        iterations=1,
        converged=True,
    )
    stats = tether_force_stats(reference_geometry, resp, PTO)
    expected = math.hypot(PTO.k_pto * 2.0, PTO.b_pto * 0.3)
    assert stats.sigma_ft == pytest.approx(expected, rel=1e-14)
