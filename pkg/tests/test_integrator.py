"""Adaptive integration, events and the closed-form orbit oracles."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bohmspin.ensemble import uniform_contour
from bohmspin.guidance import SPIN_OFF, SPIN_ON, SpinVector
from bohmspin.integrator import (IntegratorConfig, advect, boost_trajectory, closed_form_gaussian_orbit,
                                 integrate_ensemble, integrate_trajectory, rotation_angle_alpha)
from bohmspin.wavefunction import WaveModel

SPIN = SpinVector.up()


def test_closed_form_examples():
    x, _ = closed_form_gaussian_orbit((0.0, 1.0), 2.0)
    np.testing.assert_allclose(x, [-1.0, 1.0])
    x, _ = closed_form_gaussian_orbit((1.0, 0.0), 2.0)
    assert np.hypot(*x) == pytest.approx(np.sqrt(2))
    assert np.arctan2(x[1], x[0]) == pytest.approx(np.pi / 4)
    x, v = closed_form_gaussian_orbit((0.3, -0.4), 0.0)
    np.testing.assert_allclose(x, [0.3, -0.4])
    np.testing.assert_allclose(v, [0.2, 0.15])


def test_gaussian_endpoint_matches_closed_form(gaussian):
    tr = integrate_trajectory(gaussian, SPIN, SPIN_ON, (1.0, 0.0), IntegratorConfig((0.0, 4.0)))
    ref, _ = closed_form_gaussian_orbit((1.0, 0.0), 4.0)
    np.testing.assert_allclose(tr.x[-1], ref, rtol=1e-6)
    assert np.hypot(*tr.x[-1]) == pytest.approx(np.sqrt(5.0))


def test_spin_off_orbit_is_radial(gaussian):
    tr = integrate_trajectory(gaussian, SPIN, SPIN_OFF, (0.6, 0.8), IntegratorConfig((0.0, 4.0)))
    assert np.max(np.abs(tr.x[:, 0] * 0.8 - tr.x[:, 1] * 0.6)) < 1e-8


def test_plane_wave_endpoint():
    tr = integrate_trajectory(WaveModel.plane_wave((2.0, 0.0)), SPIN, SPIN_ON, (0.0, 0.0),
                              IntegratorConfig((0.0, 1.0)))
    np.testing.assert_allclose(tr.x[-1], [2.0, 0.0], atol=1e-12)


def test_fig2_ensemble_invariants(gaussian):
    pts = uniform_contour(gaussian, 1.0, 16)
    cfg = IntegratorConfig((0.0, 4.0), dense_output_stride=0.04)
    on = integrate_ensemble(gaussian, SPIN, SPIN_ON, pts, cfg)
    assert all(len(tr.t) == 101 for tr in on)
    for tr in on:
        assert np.max(np.abs(tr.speed - 0.5)) / 0.5 < 1e-6
        chord = tr.x[-1] - tr.x[0]
        rel = tr.x - tr.x[0]
        dev = np.abs(rel[:, 0] * chord[1] - rel[:, 1] * chord[0]) / np.linalg.norm(chord)
        length = np.sum(np.linalg.norm(np.diff(tr.x, axis=0), axis=1))
        assert dev.max() < 1e-6 * length
    off = integrate_ensemble(gaussian, SPIN, SPIN_OFF, pts, cfg)
    for tr in off:
        ang = np.arctan2(tr.x[:, 1], tr.x[:, 0])
        assert np.max(np.abs(np.angle(np.exp(1j * (ang - ang[0]))))) < 1e-8


def test_empty_and_order(gaussian):
    assert integrate_ensemble(gaussian, SPIN, SPIN_ON, np.empty((0, 2)), IntegratorConfig()) == []
    pts = np.array([[1.0, 0.0], [0.0, 2.0], [-0.5, 0.5]])
    trs = integrate_ensemble(gaussian, SPIN, SPIN_ON, pts, IntegratorConfig())
    np.testing.assert_array_equal([tr.initial for tr in trs], pts)
    # batch results do not depend on the batch composition
    solo = integrate_trajectory(gaussian, SPIN, SPIN_ON, pts[1], IntegratorConfig())
    np.testing.assert_allclose(trs[1].x[-1], solo.x[-1], rtol=1e-12)


def test_tolerance_convergence(product):
    errs = []
    for tol in (1e-6, 5e-7, 2.5e-7):
        end, _ = advect(product, SPIN, SPIN_ON, [[1.0, 0.5]], IntegratorConfig((0.0, 6.0), rel_tol=tol))
        ref, _ = advect(product, SPIN, SPIN_ON, [[1.0, 0.5]],
                        IntegratorConfig((0.0, 6.0), rel_tol=1e-12, abs_tol=1e-14))
        errs.append(np.linalg.norm(end - ref))
    assert errs[2] <= errs[0]


def test_axis_crossing_time_is_bisected(gaussian):
    # spin-on orbit from (0.5, -1): y = -1 + 0.5 * 0.5 t crosses zero at t = 4
    cfg = IntegratorConfig((0.0, 6.0), dense_output_stride=0.5)
    tr = integrate_trajectory(gaussian, SPIN, SPIN_ON, (0.5, -1.0), cfg)
    ev = tr.crossings("x")
    assert len(ev) == 1 and ev[0].t == pytest.approx(4.0, abs=1e-9)
    assert 0.0 <= ev[0].t <= 6.0


def test_node_start_aborts_with_event():
    model = WaveModel.superposition(2.0, 1.0, weights=(1.0, -1.0))
    tr = integrate_trajectory(model, SPIN, SPIN_ON, (0.3, 0.0), IntegratorConfig((0.0, 1.0)))
    assert tr.aborted and tr.events[0].kind == "node-abort" and len(tr.t) == 0


def test_subluminal_warning():
    from bohmspin.wavefunction import PhysicalConstants

    model = WaveModel.plane_wave((1.0, 0.0), PhysicalConstants(c_ratio=2.0))
    tr = integrate_trajectory(model, SPIN, SPIN_ON, (0.0, 0.0), IntegratorConfig((0.0, 1.0)))
    kinds = [e.kind for e in tr.events]
    assert kinds == ["subluminal-warning"] and tr.events[0].margin == pytest.approx(0.25)


def test_boost_identity_and_straight_line(gaussian):
    cfg = IntegratorConfig((0.0, 4.0), dense_output_stride=0.1)
    tr = integrate_trajectory(gaussian, SPIN, SPIN_ON, (1.0, 0.0), cfg)
    same = boost_trajectory(tr, (0.0, 0.0))
    np.testing.assert_array_equal(same.x, tr.x)
    lab = boost_trajectory(tr, (1.0, 0.0))
    d = lab.x - lab.x[0]
    direction = np.array([1.0, 0.5]) / np.hypot(1.0, 0.5)
    assert np.max(np.abs(d[:, 0] * direction[1] - d[:, 1] * direction[0])) < 1e-12


@given(ux=st.floats(-3, 3), uy=st.floats(-3, 3))
def test_boosted_model_equals_boosted_trajectory(ux, uy):
    model = WaveModel.gaussian((1.5, 1.0))
    cfg = IntegratorConfig((0.0, 3.0), rel_tol=1e-11, abs_tol=1e-12, dense_output_stride=0.25)
    rest = integrate_trajectory(model, SPIN, SPIN_ON, (0.7, -0.4), cfg)
    lab = integrate_trajectory(WaveModel.gaussian((1.5, 1.0), velocity=(ux, uy)), SPIN, SPIN_ON,
                               (0.7, -0.4), cfg)
    assert np.max(np.abs(lab.x - boost_trajectory(rest, (ux, uy)).x)) < 1e-6


def test_rotation_angle_examples():
    assert rotation_angle_alpha(1.0, np.pi / 3, 0.0) == pytest.approx(0.0, abs=1e-7)
    # [DERIVED] oracle: explicit 2-vector arithmetic
    lab = 0.5 * np.array([0.0, 1.0]) + np.array([1.0, 0.0])
    oracle = np.degrees(np.arccos(lab @ [0.0, 1.0] / np.linalg.norm(lab)))
    got = np.degrees(rotation_angle_alpha(1.0, np.pi / 2, 1.0))
    assert got == pytest.approx(oracle) and got == pytest.approx(63.43494882, abs=1e-6)
    assert abs(np.degrees(rotation_angle_alpha(1.0, np.radians(30), 50.0)) - 30.0) < 0.3
    with pytest.raises(ValueError):
        rotation_angle_alpha(0.0, 0.0, 1.0)


def test_trajectories_never_coincide_at_equal_times():
    model = WaveModel.superposition(5.0, 1.0)
    pts = np.array([[0.3, 2.5], [0.3, 2.6], [-0.2, -2.4], [0.0, 0.01]])
    trs = integrate_ensemble(model, SPIN, SPIN_ON, pts, IntegratorConfig((0.0, 8.0), dense_output_stride=0.1))
    X = np.stack([tr.x for tr in trs])
    gaps = np.linalg.norm(X[:, None] - X[None, :], axis=-1)
    assert np.min(gaps[~np.eye(4, dtype=bool)]) > 1e-6


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig((1.0, 1.0))
    with pytest.raises(ValueError):
        IntegratorConfig(rel_tol=0.0)
    with pytest.raises(ValueError):
        IntegratorConfig(crossing_axes=("z",))
    grid = IntegratorConfig((0.0, 1.0), dense_output_stride=0.3).sample_times()
    np.testing.assert_allclose(grid, [0.0, 0.3, 0.6, 0.9, 1.0])


def test_off_axis_spin_is_rejected(gaussian):
    with pytest.raises(ValueError):
        integrate_trajectory(gaussian, SpinVector((1.0, 0.0, 0.0)), SPIN_ON, (1.0, 0.0), IntegratorConfig())
