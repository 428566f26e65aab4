"""Initial-condition sets for trajectory ensembles.

Three constructions are provided:

* concentric rings whose point counts follow the density (``canonical_rings``),
* equally spaced points on one constant-density contour (``uniform_contour``),
* i.i.d. draws from ``|psi|^2`` (``sample_density``).

Random draws use one ``PCG64`` substream per block of ``BLOCK`` sample
indices, spawned from ``SeedSequence(seed)``.  A block's output depends only
on the seed and its index, so blocks can be generated in any order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EmptyRingWarning, UnsupportedModel
from .wavefunction import log_derivatives, sigma_of_t

BLOCK = 4096


@dataclass(frozen=True)
class RingSpec:
    """Ring radii plus the normalization ``reference_count`` points at ``reference_radius``."""

    radii: tuple = (0.4, 0.8, 1.2, 1.6, 2.0, 2.4)
    reference_radius: float = 1.0
    reference_count: int = 20

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        if not radii or radii[0] <= 0 or any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError(f"ring radii must be positive and strictly increasing, got {radii}")
        if not self.reference_radius > 0:
            raise ValueError("reference_radius must be positive")
        if int(self.reference_count) < 1:
            raise ValueError("reference_count must be at least 1")

    @classmethod
    def evenly_spaced(cls, step=0.4, n=6, reference_radius=1.0, reference_count=20):
        return cls(tuple(step * (i + 1) for i in range(n)), reference_radius, reference_count)


@dataclass(frozen=True)
class EnsembleSpec:
    """Declarative description of an initial-condition set.

    ``kind`` is ``"canonical-rings"`` (uses ``rings`` around the packets listed
    in ``packets``, radii in units of each packet's ``sigma0``),
    ``"uniform-contour"`` (``count`` points at contour scale ``level``), or
    ``"density-sample"`` (``count`` draws with ``seed``).
    """

    kind: str = "uniform-contour"
    rings: Optional[RingSpec] = None
    packets: Optional[tuple] = None
    level: float = 1.0
    count: int = 16
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("canonical-rings", "uniform-contour", "density-sample"):
            raise ValueError(f"unknown ensemble kind {self.kind!r}")
        if self.kind == "canonical-rings" and self.rings is None:
            object.__setattr__(self, "rings", RingSpec())
        if self.kind != "canonical-rings" and int(self.count) < 1:
            raise ValueError("count must be at least 1")
        if self.kind == "uniform-contour" and not self.level > 0:
            raise ValueError("contour level must be positive")


def _round_half_away(x):
    return int(math.floor(abs(x) + 0.5)) * (1 if x >= 0 else -1)


def ring_counts(spec, rho0):
    """``round(reference_count * rho0(r_k) / rho0(reference_radius))`` per ring."""
    ref = rho0(spec.reference_radius)
    return [_round_half_away(spec.reference_count * rho0(r) / ref) for r in spec.radii]


def gaussian_radial(sigma0=1.0):
    """Unnormalized radial profile of a symmetric packet at ``t = 0``."""
    return lambda r: math.exp(-0.5 * (r / sigma0) ** 2)


def canonical_rings(spec, rho0=None, center=(0.0, 0.0)):
    """Points on concentric rings, ``n_k`` per ring equally spaced from angle 0.

    Rings whose count rounds to zero are dropped with an ``EmptyRingWarning``.
    Returns an ``(N, 2)`` array ordered ring by ring.
    """
    rho0 = rho0 or gaussian_radial()
    c = np.asarray(center, dtype=float)
    chunks = []
    for r, n in zip(spec.radii, ring_counts(spec, rho0)):
        if n <= 0:
            warnings.warn(f"ring at radius {r:g} has no points and is dropped",
                          EmptyRingWarning, stacklevel=2)
            continue
        phi = 2.0 * np.pi * np.arange(n) / n
        chunks.append(c + r * np.column_stack([np.cos(phi), np.sin(phi)]))
    return np.concatenate(chunks) if chunks else np.empty((0, 2))


def uniform_contour(model, scale=1.0, count=16, level=None):
    """``count`` points on a constant-density contour of a single packet at ``t = 0``.

    The contour is the ellipse with semi-axes ``scale * sigma0`` per axis (a
    circle for symmetric packets).  Passing a density ``level`` instead picks
    the scale whose contour has that density.
    """
    if model.kind != "gaussian" or len(model.packets) != 1:
        raise UnsupportedModel("closed-form contours exist only for a single Gaussian packet; "
                               "use density sampling for superpositions")
    if int(count) < 1:
        raise ValueError("count must be at least 1")
    p = model.packets[0]
    if level is not None:
        peak = abs(p.weight) ** 2 / (2.0 * np.pi * p.sigma0[0] * p.sigma0[1])
        if not 0 < level < peak:
            raise ValueError(f"contour level must lie in (0, {peak:g})")
        scale = math.sqrt(2.0 * math.log(peak / level))
    phi = 2.0 * np.pi * np.arange(int(count)) / int(count)
    sx, sy = p.sigma0
    return np.asarray(p.center0) + scale * np.column_stack([sx * np.cos(phi), sy * np.sin(phi)])


def block_generator(seed, block):
    """Independent generator for one index block."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(int(block),))))


def _packet_logpdf(p, x, t, constants):
    sx = sigma_of_t(p.sigma0[0], t, constants)
    sy = sigma_of_t(p.sigma0[1], t, constants)
    c = p.center(t)
    z = (x - c) / np.array([sx, sy])
    return -0.5 * np.sum(z ** 2, axis=-1) - np.log(2.0 * np.pi * sx * sy)


def _sample_block(model, n, rng, t):
    constants = model.constants
    packets = model.packets
    widths = [np.array([sigma_of_t(s, t, constants) for s in p.sigma0]) for p in packets]
    centers = [p.center(t) for p in packets]
    if len(packets) == 1:
        return centers[0] + widths[0] * rng.standard_normal((n, 2))
    w2 = np.array([abs(p.weight) ** 2 for p in packets])
    probs = w2 / w2.sum()
    out = np.empty((n, 2))
    filled = 0
    while filled < n:
        m = 2 * (n - filled) + 16
        which = rng.choice(len(packets), size=m, p=probs)
        z = rng.standard_normal((m, 2))
        cand = np.stack(centers)[which] + np.stack(widths)[which] * z
        u = rng.random(m)
        # envelope n * sum_j |w_j|^2 |psi_j|^2 bounds |sum_j w_j psi_j|^2 (Cauchy-Schwarz)
        log_env = np.logaddexp.reduce(
            np.stack([np.log(w2[j]) + _packet_logpdf(p, cand, t, constants)
                      for j, p in enumerate(packets)]), axis=0) + np.log(len(packets))
        log_rho = log_derivatives(model, cand, t).log_rho
        keep = cand[np.log(u) < log_rho - log_env]
        take = min(len(keep), n - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
    return out


def sample_density(model, count, seed=0, t=0.0):
    """``count`` i.i.d. points from ``|psi(., t)|^2``; deterministic given ``seed``.

    Single packets are sampled exactly per axis; superpositions by rejection
    against the Gaussian mixture of the individual packet densities.
    """
    if model.kind != "gaussian":
        raise UnsupportedModel("density sampling needs a normalizable Gaussian model")
    count = int(count)
    if count < 0:
        raise ValueError("count must be nonnegative")
    blocks = []
    for b, start in enumerate(range(0, count, BLOCK)):
        n = min(BLOCK, count - start)
        blocks.append(_sample_block(model, n, block_generator(seed, b), float(t)))
    return np.concatenate(blocks) if blocks else np.empty((0, 2))


def build_ensemble(spec, model):
    """Materialize an ``EnsembleSpec`` for ``model`` as an ``(N, 2)`` array."""
    if spec.kind == "density-sample":
        return sample_density(model, spec.count, spec.seed)
    if spec.kind == "uniform-contour":
        return uniform_contour(model, spec.level, spec.count)
    if model.kind != "gaussian":
        raise UnsupportedModel("ring ensembles are built around Gaussian packets")
    which = range(len(model.packets)) if spec.packets is None else spec.packets
    chunks = []
    for j in which:
        p = model.packets[j]
        if not p.symmetric:
            raise UnsupportedModel("ring ensembles need symmetric packets")
        s0 = p.sigma0[0]
        scaled = RingSpec(tuple(r * s0 for r in spec.rings.radii),
                          spec.rings.reference_radius * s0, spec.rings.reference_count)
        chunks.append(canonical_rings(scaled, gaussian_radial(s0), p.center0))
    return np.concatenate(chunks) if chunks else np.empty((0, 2))
