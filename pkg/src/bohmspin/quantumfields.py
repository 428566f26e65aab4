"""Scalar and vector quantum potentials and the forces they generate.

With ``m v = grad S - A`` the quantum Hamilton-Jacobi equation reads
``dS/dt + (grad S - A)^2 / 2m + Q' = 0``, which gives a Lorentz-like law
``m a = E + v x B`` with ``E = -grad Q' - dA/dt`` and ``B = curl A``.

``Q``, ``Q'``, ``A`` and ``dA/dt`` are evaluated from the analytic Hessian and
time derivatives of the wavefunction.  Quantities that need third derivatives
of the density (``grad Q'``, ``curl A``, ``div j``) use second-order central
differences of those analytic values with a step proportional to the current
packet width.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NodeRegion
from .guidance import SPIN_ON, as_mode
from .wavefunction import log_derivatives, node_mask, sigma_of_t


@dataclass(frozen=True)
class FDStencil:
    """Central-difference steps.

    ``step`` is relative to the narrowest packet width ``sigma(t)``;
    ``time_step`` is relative to ``1 / gamma`` of that width.
    """

    step: float = 1e-4
    time_step: float = 1e-5

    def __post_init__(self):
        if not (self.step > 0 and self.time_step > 0):
            raise ValueError("stencil steps must be positive")


DEFAULT_STENCIL = FDStencil()


def length_scale(model, t):
    """Narrowest current packet half-width (1 for a plane wave)."""
    t = np.asarray(t, dtype=float)
    if model.kind == "plane-wave":
        return np.ones_like(t)
    widths = [sigma_of_t(s, t, model.constants) for p in model.packets for s in p.sigma0]
    return np.minimum.reduce([np.broadcast_to(w, t.shape) for w in widths])


def _derivs(model, x, t, second=True, timed=False):
    x = np.asarray(x, dtype=float)
    t = np.broadcast_to(np.asarray(t, dtype=float), x.shape[:-1])
    d = log_derivatives(model, x, t, second=second, timed=timed)
    bad = node_mask(model, d, t)
    if np.any(bad):
        raise NodeRegion(mask=bad)
    return d


def _planar(vec):
    out = np.zeros(vec.shape[:-1] + (3,))
    out[..., :2] = vec
    return out


def _Q(d):
    c = d.constants
    gl = d.grad_log_rho
    lap = np.trace(d.hess_log_rho, axis1=-2, axis2=-1)
    return -(c.hbar ** 2 / (2.0 * c.mass)) * (0.5 * lap + 0.25 * np.sum(gl ** 2, axis=-1))


def _A(d, spin):
    return -np.cross(_planar(d.grad_log_rho), spin.vector)


def _Qprime(d, spin):
    c = d.constants
    A = _A(d, spin)
    return _Q(d) + (np.sum(d.grad_S * A[..., :2], axis=-1)
                    - 0.5 * np.sum(A ** 2, axis=-1)) / c.mass


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def quantum_potential(model, x, t):
    """``Q = -(hbar^2 / 2m) lap(sqrt rho) / sqrt rho`` from the analytic Hessian."""
    return _scalar(_Q(_derivs(model, x, t)))


def scalar_potential_Qprime(model, x, t, spin, mode=SPIN_ON):
    """``Q' = Q + grad S . A / m - A^2 / 2m``; equals ``Q`` with the spin term off."""
    d = _derivs(model, x, t)
    if not as_mode(mode).spin_term:
        return _scalar(_Q(d))
    return _scalar(_Qprime(d, spin))


def vector_potential_rate(model, x, t, spin):
    """Analytic ``dA/dt = -d(grad log rho)/dt x s``."""
    d = _derivs(model, x, t, second=False, timed=True)
    return -np.cross(_planar(d.dt_grad_log_rho), spin.vector)


def _offsets(model, x, t, stencil):
    """Stencil points ``x +/- h e_i``: shape ``(..., 2, 2, 2)`` as (axis, sign, coord)."""
    x = np.asarray(x, dtype=float)
    t = np.broadcast_to(np.asarray(t, dtype=float), x.shape[:-1])
    h = stencil.step * length_scale(model, t)
    e = np.eye(2)
    sign = np.array([1.0, -1.0])
    pts = x[..., None, None, :] + h[..., None, None, None] * sign[:, None] * e[:, None, :]
    tt = np.broadcast_to(t[..., None, None], pts.shape[:-1])
    return pts, tt, h


def _gradient(fn, model, x, t, stencil):
    """Central-difference gradient of ``fn(points, times)``.

    The result has the value shape of ``fn`` followed by a trailing direction axis.
    """
    pts, tt, h = _offsets(model, x, t, stencil)
    vals = np.asarray(fn(pts, tt))
    lead = h.ndim
    diff = vals.take(0, axis=lead + 1) - vals.take(1, axis=lead + 1)
    diff = diff / (2.0 * h.reshape(h.shape + (1,) * (diff.ndim - lead)))
    return np.moveaxis(diff, lead, -1)


def grad_Qprime(model, x, t, spin, mode=SPIN_ON, stencil=DEFAULT_STENCIL):
    """Finite-difference ``grad Q'`` (``grad Q`` with the spin term off)."""
    spin_on = as_mode(mode).spin_term

    def fn(p, tt):
        d = _derivs(model, p, tt)
        return _Qprime(d, spin) if spin_on else _Q(d)

    return _gradient(fn, model, x, t, stencil)


def magnetic_field(model, x, t, spin, stencil=DEFAULT_STENCIL):
    """``B = curl A`` by central differences of the analytic ``A``."""
    def fn(p, tt):
        return _A(_derivs(model, p, tt, second=False), spin)

    jac = _gradient(fn, model, x, t, stencil)  # (..., component, direction)
    B = np.zeros(jac.shape[:-2] + (3,))
    B[..., 0] = jac[..., 2, 1]
    B[..., 1] = -jac[..., 2, 0]
    B[..., 2] = jac[..., 1, 0] - jac[..., 0, 1]
    return B


def magnetic_field_closed_form(model, x, t, spin):
    """``B = s lap(log rho) - grad(grad log rho . s)`` from the analytic Hessian."""
    d = _derivs(model, x, t)
    s = spin.vector
    H = d.hess_log_rho
    lap = np.trace(H, axis1=-2, axis2=-1)
    return s * lap[..., None] - _planar(H @ s[:2])


def fields_EB(model, x, t, spin, stencil=DEFAULT_STENCIL, mode=SPIN_ON):
    """Electric-like and magnetic-like fields as 3-vectors.

    With the spin term off, ``E = -grad Q`` and ``B = 0``.
    """
    x = np.asarray(x, dtype=float)
    gq = grad_Qprime(model, x, t, spin, mode, stencil)
    if not as_mode(mode).spin_term:
        return -_planar(gq), np.zeros(x.shape[:-1] + (3,))
    E = -_planar(gq) - vector_potential_rate(model, x, t, spin)
    return E, magnetic_field(model, x, t, spin, stencil)


def lorentz_force(model, x, t, spin, mode=SPIN_ON, stencil=DEFAULT_STENCIL):
    """``E + v x B`` at the local guidance velocity (``-grad Q`` with the spin term off)."""
    x = np.asarray(x, dtype=float)
    if not as_mode(mode).spin_term:
        return -_planar(grad_Qprime(model, x, t, spin, mode, stencil))
    E, B = fields_EB(model, x, t, spin, stencil, mode)
    d = _derivs(model, x, t, second=False)
    v = (d.grad_S - _A(d, spin)[..., :2]) / model.constants.mass
    return E + np.cross(_planar(v), B)


def current(model, x, t, spin, mode=SPIN_ON):
    """Probability current ``rho v`` for the chosen guidance law."""
    d = _derivs(model, x, t, second=False)
    p = d.grad_S
    if as_mode(mode).spin_term:
        p = p - _A(d, spin)[..., :2]
    return d.rho[..., None] * p / model.constants.mass


def continuity_residual(model, x, t, spin, stencil=DEFAULT_STENCIL, mode=SPIN_ON):
    """``d rho / dt + div j``; the rate is analytic, the divergence is a central difference."""
    d = _derivs(model, x, t, second=False, timed=True)
    rate = d.rho * d.dt_log_rho
    jac = _gradient(lambda p, tt: current(model, p, tt, spin, mode), model, x, t, stencil)
    return _scalar(rate + np.trace(jac, axis1=-2, axis2=-1))


def hj_residual(model, x, t, stencil=None):
    """``dS/dt + |grad S|^2 / 2m + Q`` (no external potential).

    ``dS/dt`` is analytic unless a stencil is passed, in which case it is the
    central difference ``hbar Im log(psi(t + h) / psi(t - h)) / 2h``.
    """
    c = model.constants
    d = _derivs(model, x, t, timed=True)
    if stencil is None:
        dS = d.dt_S
    else:
        tarr = np.broadcast_to(np.asarray(t, dtype=float), d.log_scale.shape)
        h = stencil.time_step * _time_scale(model, tarr)
        fwd = log_derivatives(model, x, tarr + h)
        bwd = log_derivatives(model, x, tarr - h)
        ratio = fwd.amp / bwd.amp * np.exp(fwd.log_scale - bwd.log_scale)
        dS = c.hbar * np.angle(ratio) / (2.0 * h)
    return _scalar(dS + np.sum(d.grad_S ** 2, axis=-1) / (2.0 * c.mass) + _Q(d))


def _time_scale(model, t):
    if model.kind == "plane-wave":
        k2 = float(np.dot(model.wavevector, model.wavevector))
        omega = model.constants.hbar * k2 / (2.0 * model.constants.mass)
        return np.full(np.shape(t), 1.0 / max(omega, 1.0))
    s0 = min(min(p.sigma0) for p in model.packets)
    return np.full(np.shape(t), 1.0 / float(model.constants.gamma(s0)))
