"""Wavefunction evaluation against independent constructions."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bohmspin.errors import NodeRegion
from bohmspin.wavefunction import (GaussianPacket, PhysicalConstants, WaveModel, boost_model,
                                   eval_fields, eval_psi, log_derivatives, sigma_of_t)


def fft_packet_1d(x, t, sigma0=1.0, center=0.0, k0=0.0, hbar=1.0, m=1.0):
    """Free evolution of a 1-D Gaussian by exact propagation in momentum space."""
    n, L = 2 ** 14, 400.0
    grid = np.linspace(-L / 2, L / 2, n, endpoint=False)
    psi0 = (2 * np.pi * sigma0 ** 2) ** -0.25 * np.exp(-(grid - center) ** 2 / (4 * sigma0 ** 2)
                                                     + 1j * k0 * (grid - center))
    k = 2 * np.pi * np.fft.fftfreq(n, d=grid[1] - grid[0])
    coeff = np.fft.fft(psi0) * np.exp(-1j * hbar * k ** 2 * t / (2 * m))
    # sum the Fourier series exactly at the query points
    return np.exp(1j * np.outer(np.asarray(x) - grid[0], k)) @ coeff / n


def test_single_packet_matches_momentum_space_propagation():
    # [DERIVED] oracle: FFT propagation of the initial packet
    model = WaveModel.gaussian((1.5, 1.0), center=(0.3, -0.2), velocity=(0.7, -0.4))
    xs = np.linspace(-3, 5, 9)
    for t in (0.0, 0.8, 3.0):
        ox = fft_packet_1d(xs, t, 1.5, 0.3, 0.7)
        oy = fft_packet_1d(np.array([0.4]), t, 1.0, -0.2, -0.4)
        got = eval_psi(model, np.column_stack([xs, np.full_like(xs, 0.4)]), t)
        np.testing.assert_allclose(got, ox * oy[0], atol=2e-6)


def test_initial_peak_density():
    # |psi(0, 0)|^2 = 1 / (2 pi sigma0^2) for a normalized packet
    assert abs(eval_psi(WaveModel.gaussian(1.0), (0.0, 0.0), 0.0)) ** 2 == pytest.approx(1 / (2 * np.pi))
    assert abs(eval_psi(WaveModel.gaussian(1.0), (0.0, 0.0), 2.0)) ** 2 == pytest.approx(1 / (4 * np.pi))


def test_sigma_of_t():
    assert sigma_of_t(1.0, 2.0) == pytest.approx(np.sqrt(2.0))
    assert sigma_of_t(2.0, 0.0) == 2.0
    with pytest.raises(ValueError):
        sigma_of_t(0.0, 1.0)


def test_normalization_by_quadrature(pair):
    g = np.linspace(-12, 12, 601)
    X, Y = np.meshgrid(g, g, indexing="ij")
    rho = np.abs(eval_psi(WaveModel.gaussian((2.0, 1.0)), np.stack([X, Y], -1), 1.3)) ** 2
    assert np.trapezoid(np.trapezoid(rho, g), g) == pytest.approx(1.0, rel=1e-6)


def _fd_schrodinger_residual(model, x, t, h=1e-3):
    psi = lambda p, s: eval_psi(model, p, s)
    dt = (psi(x, t + h) - psi(x, t - h)) / (2 * h)
    lap = 0
    for e in np.eye(2):
        lap = lap + (psi(x + h * e, t) - 2 * psi(x, t) + psi(x - h * e, t)) / h ** 2
    c = model.constants
    return 1j * c.hbar * dt + c.hbar ** 2 / (2 * c.mass) * lap


@pytest.mark.parametrize("model", [
    WaveModel.gaussian((2.0, 1.0), velocity=(0.3, 0.1)),
    WaveModel.superposition(5.0, 1.0, velocity=(1.0, 0.0), weights=(1.0, 0.5j)),
    WaveModel.plane_wave((1.0, -0.5)),
])
def test_free_schrodinger_equation(model, rng):
    pts = rng.uniform(-3, 3, size=(20, 2))
    res = _fd_schrodinger_residual(model, pts, 0.7)
    scale = np.abs(eval_psi(model, pts, 0.7)).max()
    assert np.max(np.abs(res)) < 1e-5 * max(scale, 1.0)


@given(x=st.floats(-3, 3), y=st.floats(-3, 3), t=st.floats(0, 5))
def test_analytic_derivatives_match_differences(x, y, t):
    model = WaveModel.superposition(3.0, (1.0, 1.5), weights=(1.0, -0.7))
    p = np.array([x, y])
    d = log_derivatives(model, p, t, second=True, timed=True)
    h = 1e-5
    psi = lambda q, s: eval_psi(model, q, s)
    ref = psi(p, t)
    if abs(ref) < 1e-6:
        return
    for i, e in enumerate(np.eye(2)):
        g = (psi(p + h * e, t) - psi(p - h * e, t)) / (2 * h) / ref
        assert abs(g - d.grad[i]) < 1e-5 * (1 + abs(g))
    gt = (psi(p, t + h) - psi(p, t - h)) / (2 * h) / ref
    assert abs(gt - d.dt) < 1e-5 * (1 + abs(gt))


def test_boost_equals_galilean_transform():
    # psi'(x, t) = psi(x - u t, t) exp(i (m u.x - m u^2 t / 2) / hbar)
    model = WaveModel.superposition(4.0, 1.0, weights=(1.0, 0.3 + 0.4j))
    u = np.array([0.8, -0.3])
    boosted = boost_model(model, u)
    pts = np.random.default_rng(0).uniform(-3, 3, size=(15, 2))
    for t in (0.0, 1.1):
        ref = eval_psi(model, pts - u * t, t) * np.exp(1j * (pts @ u - 0.5 * (u @ u) * t))
        np.testing.assert_allclose(eval_psi(boosted, pts, t), ref, atol=1e-14)


def test_boost_plane_wave_shifts_wavevector():
    assert boost_model(WaveModel.plane_wave((1.0, 0.0)), (0.5, 2.0)).wavevector == (1.5, 2.0)


def test_node_region_raised_on_antisymmetric_line():
    model = WaveModel.superposition(2.0, 1.0, weights=(1.0, -1.0))
    with pytest.raises(NodeRegion) as exc:
        eval_fields(model, np.array([[0.5, 0.0], [0.5, 1.0]]), 0.3)
    assert exc.value.mask.tolist() == [True, False]


def test_invalid_packets():
    with pytest.raises(ValueError):
        GaussianPacket(sigma0=(1.0, -1.0))
    with pytest.raises(ValueError):
        GaussianPacket(weight=0)
    with pytest.raises(ValueError):
        WaveModel(())
    with pytest.raises(ValueError):
        PhysicalConstants(hbar=0.0)


def test_far_tail_stays_finite():
    # log-sum-exp keeps the phase gradient finite far from both packets
    model = WaveModel.superposition(20.0, 1.0)
    f = eval_fields(model, (0.0, 60.0), 0.0, check=False)
    assert np.all(np.isfinite(f.grad_S)) and np.all(np.isfinite(f.grad_log_rho))
