"""Spin-extended guidance law.

The particle velocity is ``m v = grad S - A`` with the spin vector potential
``A = -grad(log rho) x s``.  Switching the spin term off gives the original
``m v = grad S``.  Both flows transport the same density because ``rho A`` is
divergence free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .wavefunction import PhysicalConstants


@dataclass(frozen=True)
class SpinVector:
    """Fixed spin eigenvector ``s = (hbar / 2) n`` with unit direction ``n``."""

    direction: tuple = (0.0, 0.0, 1.0)
    hbar: float = 1.0

    def __post_init__(self):
        n = np.asarray(self.direction, dtype=float)
        if n.shape != (3,) or not np.all(np.isfinite(n)):
            raise ValueError(f"spin direction must be a finite 3-vector, got {self.direction!r}")
        norm = np.linalg.norm(n)
        if norm == 0:
            raise ValueError("spin direction must be nonzero")
        object.__setattr__(self, "direction", tuple(float(v) for v in n / norm))
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")

    @classmethod
    def up(cls, constants=None, sign=1):
        """Spin along ``+z`` (or ``-z`` for ``sign=-1``)."""
        hbar = (constants or PhysicalConstants()).hbar
        return cls((0.0, 0.0, float(np.sign(sign) or 1.0)), hbar)

    @property
    def magnitude(self):
        return 0.5 * self.hbar

    @property
    def vector(self):
        return self.magnitude * np.asarray(self.direction)

    @property
    def along_z(self):
        return self.direction[0] == 0.0 and self.direction[1] == 0.0


@dataclass(frozen=True)
class GuidanceMode:
    """``spin_term=False`` reduces the law to ``m v = grad S``."""

    spin_term: bool = True


SPIN_ON = GuidanceMode(True)
SPIN_OFF = GuidanceMode(False)


def as_mode(mode):
    if isinstance(mode, GuidanceMode):
        return mode
    return GuidanceMode(bool(mode))


def _planar(vec):
    out = np.zeros(vec.shape[:-1] + (3,))
    out[..., :2] = vec
    return out


def vector_potential(sample, spin):
    """``A = -grad(log rho) x s`` as a 3-vector per point."""
    return -np.cross(_planar(sample.grad_log_rho), spin.vector)


def velocity(sample, spin, mode=SPIN_ON, constants=None):
    """In-plane guidance velocity."""
    constants = constants or sample.constants
    p = np.array(sample.grad_S, dtype=float)
    if as_mode(mode).spin_term:
        p = p - vector_potential(sample, spin)[..., :2]
    return p / constants.mass


def spin_significance(sample, constants=None):
    """``|grad S| / ((hbar / 2) |grad log rho|)``; ``inf`` where the density is flat.

    Large values mean the spin term is negligible against the convective flow.
    """
    constants = constants or sample.constants
    num = np.linalg.norm(sample.grad_S, axis=-1)
    den = 0.5 * constants.hbar * np.linalg.norm(sample.grad_log_rho, axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
    return float(out) if np.ndim(out) == 0 else out


def subluminal_margin(sample, spin, constants=None):
    """``0.5 sqrt(|j / rho|^2 / c^2 + (grad log rho . s / (m c))^2)``.

    Values well below one mean the state sits in the non-relativistic regime.
    ``j`` is the full current including the spin part.
    """
    constants = constants or sample.constants
    c = constants.c_ratio
    v = velocity(sample, spin, SPIN_ON, constants)
    along = _planar(sample.grad_log_rho) @ spin.vector / (constants.mass * c)
    out = 0.5 * np.sqrt(np.sum(v ** 2, axis=-1) / c ** 2 + along ** 2)
    return float(out) if np.ndim(out) == 0 else out
