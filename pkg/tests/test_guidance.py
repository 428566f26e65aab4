"""Guidance law: velocities, vector potential and the regime monitors."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bohmspin.guidance import (SPIN_OFF, SPIN_ON, GuidanceMode, SpinVector, as_mode,
                               spin_significance, subluminal_margin, velocity, vector_potential)
from bohmspin.wavefunction import PhysicalConstants, WaveModel, eval_fields, eval_psi


def test_vector_potential_examples(gaussian, spin):
    np.testing.assert_allclose(vector_potential(eval_fields(gaussian, (1.0, 0.0), 0.0), spin),
                               [0.0, -0.5, 0.0], atol=1e-15)
    np.testing.assert_allclose(vector_potential(eval_fields(gaussian, (0.0, 0.0), 3.0), spin), 0.0)
    pw = WaveModel.plane_wave((2.0, 0.0))
    np.testing.assert_allclose(vector_potential(eval_fields(pw, (0.3, 0.1), 1.0), spin), 0.0)


def test_velocity_examples(gaussian, spin):
    f = eval_fields(gaussian, (1.0, 0.0), 0.0)
    np.testing.assert_allclose(velocity(f, spin, SPIN_ON), [0.0, 0.5], atol=1e-15)
    np.testing.assert_allclose(velocity(f, spin, SPIN_OFF), [0.0, 0.0], atol=1e-15)
    pw = eval_fields(WaveModel.plane_wave((2.0, 0.0)), (0.4, -1.0), 0.5)
    for mode in (SPIN_ON, SPIN_OFF):
        np.testing.assert_allclose(velocity(pw, spin, mode), [2.0, 0.0])


def test_spin_flip_reverses_spin_part(gaussian):
    f = eval_fields(gaussian, (0.7, -0.2), 1.3)
    up = velocity(f, SpinVector.up(sign=1)) - velocity(f, SpinVector.up(), SPIN_OFF)
    down = velocity(f, SpinVector.up(sign=-1)) - velocity(f, SpinVector.up(), SPIN_OFF)
    np.testing.assert_allclose(up, -down, atol=1e-15)


def _fd_phase_and_log_density(model, x, t, h=1e-5):
    """Finite-difference grad S and grad log rho from psi alone."""
    gS, gl = np.zeros(2), np.zeros(2)
    for i, e in enumerate(np.eye(2)):
        a, b = eval_psi(model, x + h * e, t), eval_psi(model, x - h * e, t)
        gS[i] = np.angle(a / b) / (2 * h)
        gl[i] = (np.log(abs(a) ** 2) - np.log(abs(b) ** 2)) / (2 * h)
    return gS, gl


def test_spin_significance_equals_gamma_t():
    # [DERIVED] with a finite-difference oracle; at x = (1, 0), gamma t = 1 the ratio is 1
    model = WaveModel.gaussian(1.0)
    x = np.array([1.0, 0.0])
    gS, gl = _fd_phase_and_log_density(model, x, 2.0)
    oracle = np.linalg.norm(gS) / (0.5 * np.linalg.norm(gl))
    got = spin_significance(eval_fields(model, x, 2.0))
    assert got == pytest.approx(oracle, rel=1e-7)
    assert got == pytest.approx(1.0, rel=1e-12)


@given(r=st.floats(0.1, 3.0), gt=st.floats(0.0, 10.0))
def test_spin_significance_is_gamma_t_everywhere(r, gt):
    model = WaveModel.gaussian(1.0)
    t = gt / model.constants.gamma(1.0)
    assert spin_significance(eval_fields(model, (r, 0.0), t)) == pytest.approx(gt, abs=1e-12)


def test_spin_significance_limits(gaussian):
    assert spin_significance(eval_fields(gaussian, (0.5, 0.5), 0.0)) == 0.0
    assert spin_significance(eval_fields(WaveModel.plane_wave((1.0, 0.0)), (0.0, 0.0), 0.0)) == np.inf


def test_subluminal_margin_examples(spin):
    c = PhysicalConstants(c_ratio=50.0)
    g = WaveModel.gaussian(1.0, constants=c)
    assert subluminal_margin(eval_fields(g, (2.0, 0.0), 0.0), spin) == pytest.approx(0.5 * 1.0 / 50.0)
    pw = WaveModel.plane_wave((0.5, 0.0), constants=c)
    assert subluminal_margin(eval_fields(pw, (0.0, 0.0), 0.0), spin) == pytest.approx(0.005)


@given(x=st.floats(-3, 3), y=st.floats(-3, 3), t=st.floats(0, 4))
def test_spin_current_is_divergence_free(x, y, t):
    # rho A = -grad rho x s has zero divergence, so both modes carry the same density
    model = WaveModel.superposition(3.0, (1.0, 1.4), weights=(1.0, 0.6j))
    sp = SpinVector.up()
    h = 1e-5
    div = 0.0
    for i, e in enumerate(np.eye(2)):
        p = np.array([x, y])
        fa, fb = eval_fields(model, p + h * e, t, check=False), eval_fields(model, p - h * e, t, check=False)
        ja = fa.rho * (velocity(fa, sp, SPIN_ON) - velocity(fa, sp, SPIN_OFF))
        jb = fb.rho * (velocity(fb, sp, SPIN_ON) - velocity(fb, sp, SPIN_OFF))
        div += (ja[i] - jb[i]) / (2 * h)
    assert abs(div) < 1e-7


def test_spin_vector_validation():
    assert SpinVector((0, 0, 5)).direction == (0.0, 0.0, 1.0)
    assert SpinVector.up(sign=-1).vector[2] == -0.5
    with pytest.raises(ValueError):
        SpinVector((0, 0, 0))
    with pytest.raises(ValueError):
        SpinVector((1, 2))
    assert not SpinVector((1, 0, 1)).along_z
    assert as_mode(False) == SPIN_OFF and as_mode(GuidanceMode(True)) == SPIN_ON
