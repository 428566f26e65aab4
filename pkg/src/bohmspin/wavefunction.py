"""Analytic free-particle wavefunctions in the plane.

A model is either a weighted superposition of spreading Gaussian packets or a
single plane wave.  Every packet is an exact solution of the free Schrodinger
equation, so values, spatial derivatives up to second order and time
derivatives are all available in closed form.

Packets are parametrized per axis ``a`` by a centre ``c``, group velocity
``u`` and initial half-width ``s0``::

    psi_a(x, t) = (2 pi s0^2)^(-1/4) d^(-1/2)
                  exp(-(x - c - u t)^2 / (4 s0^2 d) + i k (x - c) - i k u t / 2)

with ``d = 1 + i gamma t``, ``gamma = hbar / (2 m s0^2)`` and ``k = m u / hbar``.
The density of one axis is a normal law of width
``sigma(t) = s0 sqrt(1 + gamma^2 t^2)`` centred on ``c + u t``.

Superpositions are evaluated in log space: each packet contributes
``exp(L_j - M)`` with ``M`` the largest real part, so ratios such as
``grad psi / psi`` stay finite far out in the tails.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import NodeRegion

#: Density below ``NODE_FLOOR * peak_density`` is treated as a node.
NODE_FLOOR = 1e-14


@dataclass(frozen=True)
class PhysicalConstants:
    """Action, mass and the speed of light in the internal unit system."""

    hbar: float = 1.0
    mass: float = 1.0
    c_ratio: float = 2e5

    def __post_init__(self):
        for name in ("hbar", "mass", "c_ratio"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")

    def gamma(self, sigma0):
        """Spreading rate ``hbar / (2 m sigma0^2)``."""
        return self.hbar / (2.0 * self.mass * np.asarray(sigma0, dtype=float) ** 2)

    def characteristic_speed(self, sigma0):
        """``w = gamma sigma0 = hbar / (2 m sigma0)``."""
        return self.hbar / (2.0 * self.mass * float(sigma0))


def _pair(value, name):
    arr = np.broadcast_to(np.asarray(value, dtype=float), (2,))
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return (float(arr[0]), float(arr[1]))


@dataclass(frozen=True)
class GaussianPacket:
    """One free Gaussian packet; ``sigma0`` may differ per axis."""

    center0: tuple = (0.0, 0.0)
    group_velocity: tuple = (0.0, 0.0)
    sigma0: tuple = (1.0, 1.0)
    weight: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center0", _pair(self.center0, "center0"))
        object.__setattr__(self, "group_velocity", _pair(self.group_velocity, "group_velocity"))
        object.__setattr__(self, "sigma0", _pair(self.sigma0, "sigma0"))
        object.__setattr__(self, "weight", complex(self.weight))
        if min(self.sigma0) <= 0:
            raise ValueError(f"sigma0 must be positive, got {self.sigma0}")
        if not (abs(self.weight) > 0 and np.isfinite(abs(self.weight))):
            raise ValueError(f"weight must be finite and nonzero, got {self.weight}")

    @property
    def symmetric(self):
        return self.sigma0[0] == self.sigma0[1]

    def center(self, t):
        """Density centre at time ``t`` (broadcasts over ``t``)."""
        t = np.asarray(t, dtype=float)[..., None]
        return np.asarray(self.center0) + np.asarray(self.group_velocity) * t


@dataclass(frozen=True)
class WaveModel:
    """A superposition of Gaussian packets, or a plane wave when ``wavevector`` is set."""

    packets: tuple = ()
    wavevector: Optional[tuple] = None
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        object.__setattr__(self, "packets", tuple(self.packets))
        if self.wavevector is not None:
            object.__setattr__(self, "wavevector", _pair(self.wavevector, "wavevector"))
            if self.packets:
                raise ValueError("a plane-wave model carries no packets")
        elif not self.packets:
            raise ValueError("a Gaussian model needs at least one packet")

    @property
    def kind(self):
        return "plane-wave" if self.wavevector is not None else "gaussian"

    @property
    def is_single_packet(self):
        return self.kind == "gaussian" and len(self.packets) == 1

    # -- constructors ------------------------------------------------------

    @classmethod
    def gaussian(cls, sigma0=1.0, center=(0.0, 0.0), velocity=(0.0, 0.0),
                 constants=None):
        """Single packet; ``sigma0`` is a scalar or a per-axis pair."""
        constants = constants or PhysicalConstants()
        return cls((GaussianPacket(center, velocity, sigma0),), None, constants)

    @classmethod
    def superposition(cls, separation, sigma0=1.0, velocity=(0.0, 0.0),
                      center=(0.0, 0.0), weights=(1.0, 1.0), constants=None):
        """Two identical packets at ``center +/- (0, separation / 2)``."""
        constants = constants or PhysicalConstants()
        cx, cy = _pair(center, "center")
        a = 0.5 * float(separation)
        packets = (
            GaussianPacket((cx, cy + a), velocity, sigma0, weights[0]),
            GaussianPacket((cx, cy - a), velocity, sigma0, weights[1]),
        )
        return cls(packets, None, constants)

    @classmethod
    def plane_wave(cls, wavevector, constants=None):
        return cls((), wavevector, constants or PhysicalConstants())


# -- closed-form scalars -------------------------------------------------------

def sigma_of_t(sigma0, t, constants=None):
    """Half-width of a free packet, ``sigma0 sqrt(1 + gamma^2 t^2)``."""
    constants = constants or PhysicalConstants()
    sigma0 = np.asarray(sigma0, dtype=float)
    if np.any(sigma0 <= 0):
        raise ValueError("sigma0 must be positive")
    g = constants.gamma(sigma0)
    out = sigma0 * np.sqrt(1.0 + (g * np.asarray(t, dtype=float)) ** 2)
    return float(out) if np.ndim(out) == 0 else out


def peak_density(model, t):
    """Upper bound on ``max_x |psi(x, t)|^2`` used to scale the node floor."""
    if model.kind == "plane-wave":
        return np.ones_like(np.asarray(t, dtype=float))
    t = np.asarray(t, dtype=float)
    total = np.zeros_like(t)
    for p in model.packets:
        sx = sigma_of_t(p.sigma0[0], t, model.constants)
        sy = sigma_of_t(p.sigma0[1], t, model.constants)
        total = total + abs(p.weight) / np.sqrt(2.0 * np.pi * sx * sy)
    return total ** 2


# -- log-derivative evaluation -------------------------------------------------

@dataclass
class LogDerivatives:
    """Derivatives of ``psi`` divided by ``psi`` at a batch of points.

    ``psi = exp(log_scale) * amp``.  ``grad``, ``hess``, ``dt`` and ``grad_dt``
    hold ``grad psi / psi``, ``hess psi / psi``, ``psi_t / psi`` and
    ``grad psi_t / psi``; the optional ones are ``None`` unless requested.
    """

    log_scale: np.ndarray
    amp: np.ndarray
    grad: np.ndarray
    hess: Optional[np.ndarray]
    dt: Optional[np.ndarray]
    grad_dt: Optional[np.ndarray]
    constants: PhysicalConstants

    @property
    def psi(self):
        return np.exp(self.log_scale) * self.amp

    @property
    def log_rho(self):
        with np.errstate(divide="ignore"):
            return 2.0 * self.log_scale + np.log(np.abs(self.amp) ** 2)

    @property
    def rho(self):
        return np.exp(2.0 * self.log_scale) * np.abs(self.amp) ** 2

    @property
    def grad_log_rho(self):
        return 2.0 * self.grad.real

    @property
    def grad_S(self):
        return self.constants.hbar * self.grad.imag

    @property
    def hess_log_rho(self):
        g = self.grad
        return 2.0 * (self.hess - g[..., :, None] * g[..., None, :]).real

    @property
    def hess_S(self):
        g = self.grad
        return self.constants.hbar * (self.hess - g[..., :, None] * g[..., None, :]).imag

    @property
    def dt_log_rho(self):
        return 2.0 * self.dt.real

    @property
    def dt_S(self):
        return self.constants.hbar * self.dt.imag

    @property
    def dt_grad_log_rho(self):
        return 2.0 * (self.grad_dt - self.grad * self.dt[..., None]).real

    @property
    def dt_grad_S(self):
        return self.constants.hbar * (self.grad_dt - self.grad * self.dt[..., None]).imag


def _packet_logs(p, x, t, constants, second, timed):
    """Log of one packet and its derivatives (all relative to the packet itself)."""
    hbar, m = constants.hbar, constants.mass
    c = np.asarray(p.center0)
    u = np.asarray(p.group_velocity)
    s0 = np.asarray(p.sigma0)
    gam = hbar / (2.0 * m * s0 ** 2)
    k = m * u / hbar
    tt = t[..., None]
    d = 1.0 + 1j * gam * tt
    alpha = 1.0 / (4.0 * s0 ** 2 * d)
    xi = x - c - u * tt
    per_axis = (-0.25 * np.log(2.0 * np.pi * s0 ** 2) - 0.5 * np.log(d)
                - alpha * xi ** 2 + 1j * k * (x - c) - 0.5j * k * u * tt)
    logv = np.log(p.weight) + per_axis.sum(axis=-1)
    grad = -2.0 * alpha * xi + 1j * k
    hess = dt = grad_dt = None
    if second:
        hess = np.zeros(x.shape + (2,), dtype=complex)
        hess[..., 0, 0] = -2.0 * alpha[..., 0]
        hess[..., 1, 1] = -2.0 * alpha[..., 1]
    if timed:
        rate = 1j * gam / d
        dt = (-0.5 * rate + alpha * rate * xi ** 2 + 2.0 * alpha * xi * u
              - 0.5j * k * u).sum(axis=-1)
        grad_dt = 2.0 * alpha * rate * xi + 2.0 * alpha * u
    return logv, grad, hess, dt, grad_dt


def log_derivatives(model, x, t, second=False, timed=False):
    """Evaluate ``psi`` and its normalized derivatives at points ``x`` (shape ``(..., 2)``).

    ``t`` broadcasts against ``x.shape[:-1]``.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (2,):
        raise ValueError(f"points must have a trailing axis of length 2, got {x.shape}")
    t = np.broadcast_to(np.asarray(t, dtype=float), x.shape[:-1]).copy()
    constants = model.constants
    if model.kind == "plane-wave":
        k = np.asarray(model.wavevector)
        omega = constants.hbar * float(k @ k) / (2.0 * constants.mass)
        phase = x @ k - omega * t
        grad = np.broadcast_to(1j * k, x.shape).astype(complex)
        hess = dt = grad_dt = None
        if second:
            hess = np.broadcast_to(-np.outer(k, k), x.shape + (2,)).astype(complex)
        if timed:
            dt = np.full(t.shape, -1j * omega)
            grad_dt = grad * dt[..., None]
        return LogDerivatives(np.zeros(t.shape), np.exp(1j * phase), grad, hess, dt,
                              grad_dt, constants)

    parts = [_packet_logs(p, x, t, constants, second, timed) for p in model.packets]
    logs = np.stack([q[0] for q in parts])
    scale = logs.real.max(axis=0)
    e = np.exp(logs - scale)
    amp = e.sum(axis=0)
    w = e / amp
    grad = sum(w[j][..., None] * q[1] for j, q in enumerate(parts))
    hess = dt = grad_dt = None
    if second:
        hess = sum(w[j][..., None, None]
                   * (q[2] + q[1][..., :, None] * q[1][..., None, :])
                   for j, q in enumerate(parts))
    if timed:
        dt = sum(w[j] * q[3] for j, q in enumerate(parts))
        grad_dt = sum(w[j][..., None] * (q[4] + q[1] * q[3][..., None])
                      for j, q in enumerate(parts))
    return LogDerivatives(scale, amp, grad, hess, dt, grad_dt, constants)


def node_mask(model, derivs, t):
    """True where the density is below the node floor."""
    floor = NODE_FLOOR * peak_density(model, t)
    with np.errstate(divide="ignore"):
        return ~(derivs.log_rho >= np.log(floor))


# -- public evaluation ---------------------------------------------------------

@dataclass
class FieldSample:
    """Density and phase-gradient data at one point or a batch of points."""

    rho: np.ndarray
    grad_rho: np.ndarray
    grad_S: np.ndarray
    psi: np.ndarray
    grad_log_rho: np.ndarray
    constants: PhysicalConstants


def eval_psi(model, x, t):
    """Complex amplitude at ``x`` (shape ``(2,)`` or ``(..., 2)``) and time ``t``."""
    out = log_derivatives(model, x, t).psi
    return complex(out) if np.ndim(out) == 0 else out


def eval_fields(model, x, t, check=True):
    """Density, its gradient and the phase gradient ``hbar Im(grad psi / psi)``.

    Raises ``NodeRegion`` if any point lies below the node floor (unless
    ``check`` is false, in which case those entries may be non-finite).
    """
    d = log_derivatives(model, x, t)
    tb = np.broadcast_to(np.asarray(t, dtype=float), d.log_scale.shape)
    if check:
        bad = node_mask(model, d, tb)
        if np.any(bad):
            raise NodeRegion(mask=bad)
    rho = d.rho
    gl = d.grad_log_rho
    return FieldSample(rho, rho[..., None] * gl, d.grad_S, d.psi, gl, model.constants)


def boost_model(model, u):
    """Galilean boost by velocity ``u``: ``psi'(x, t) = psi(x - u t, t) exp(i(m u.x - m u^2 t / 2) / hbar)``.

    Each packet gains velocity ``u``; packet weights pick up the constant phase
    ``m u.c_j / hbar`` that the re-centred packet form would otherwise drop.
    """
    u = np.asarray(_pair(u, "u"))
    c = model.constants
    ku = c.mass * u / c.hbar
    if model.kind == "plane-wave":
        return WaveModel((), tuple(np.asarray(model.wavevector) + ku), c)
    packets = tuple(
        GaussianPacket(p.center0, tuple(np.asarray(p.group_velocity) + u), p.sigma0,
                       p.weight * np.exp(1j * float(ku @ np.asarray(p.center0))))
        for p in model.packets)
    return WaveModel(packets, None, c)
