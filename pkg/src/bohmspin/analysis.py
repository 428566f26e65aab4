"""Statistical and physical checks on trajectory ensembles.

Statistical gates use one-sample Kolmogorov-Smirnov tests for continuous laws
and Pearson chi-square tests for binned profiles, always with fixed seeds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .ensemble import sample_density
from .errors import InsufficientSamples
from .guidance import SPIN_OFF, spin_significance
from .integrator import IntegratorConfig, Trajectory, advect
from .quantumfields import grad_Qprime, lorentz_force
from .wavefunction import PhysicalConstants, eval_fields, log_derivatives, sigma_of_t

MIN_SAMPLES = 100


@dataclass
class HistogramReport:
    bin_edges: np.ndarray
    counts: np.ndarray
    test_statistic: float
    p_value: float
    details: dict = field(default_factory=dict)


@dataclass
class LimitMonitor:
    """Spin-significance ratio and quantum-force magnitude at one point."""

    spin_ratio: float
    qforce_scale: float

    def classical(self, ratio_min=10.0, force_max=0.1):
        return self.spin_ratio > ratio_min and self.qforce_scale < force_max


@dataclass
class MCEstimate:
    mean: np.ndarray
    stderr: np.ndarray
    n: int


# -- speed law ------------------------------------------------------------------

def speed_distribution_check(constants, samples, sigma0=1.0, bins=40):
    """KS test of trajectory speeds against the Rayleigh law of scale ``w = hbar / 2 m sigma0``."""
    v = np.asarray(samples, dtype=float).ravel()
    if len(v) < MIN_SAMPLES:
        raise InsufficientSamples(f"need at least {MIN_SAMPLES} speeds, got {len(v)}")
    w = constants.characteristic_speed(sigma0)
    ks = stats.kstest(v, stats.rayleigh(scale=w).cdf)
    counts, edges = np.histogram(v, bins=bins, range=(0.0, max(v.max(), 5 * w)))
    centers = 0.5 * (edges[1:] + edges[:-1])
    tail = float(np.mean(v > 3 * w))
    expected = float(np.exp(-4.5))
    return HistogramReport(edges, counts, float(ks.statistic), float(ks.pvalue), {
        "w": w,
        "mode": float(centers[np.argmax(counts)]),
        "tail_fraction": tail,
        "tail_expected": expected,
        "tail_sigma": float(np.sqrt(expected * (1 - expected) / len(v))),
    })


# -- ensemble angular momentum ----------------------------------------------------

def mean_spin_angular_momentum(model, spin, n_samples, seed=0):
    """Monte-Carlo ``<x x (grad log rho x s)>`` over ``rho`` at ``t = 0``."""
    pts = sample_density(model, n_samples, seed)
    d = log_derivatives(model, pts, 0.0)
    x3 = np.zeros((len(pts), 3))
    x3[:, :2] = pts
    g3 = np.zeros_like(x3)
    g3[:, :2] = d.grad_log_rho
    L = np.cross(x3, np.cross(g3, spin.vector))
    return MCEstimate(L.mean(axis=0), L.std(axis=0, ddof=1) / np.sqrt(len(L)), len(L))


# -- density transport ---------------------------------------------------------------

def _span(model, t, axis, width=10.0):
    lo, hi = np.inf, -np.inf
    for p in model.packets:
        c = p.center(t)[axis]
        s = sigma_of_t(p.sigma0[axis], t, model.constants)
        lo, hi = min(lo, c - width * s), max(hi, c + width * s)
    return lo, hi


def marginal_density(model, t, axis=1, n=2001, n_other=801):
    """Grid and (normalized) marginal of ``|psi(., t)|^2`` along ``axis``.

    The other coordinate is integrated by the trapezoidal rule over ten packet
    widths around every packet.
    """
    other = 1 - axis
    a = np.linspace(*_span(model, t, axis), n)
    b = np.linspace(*_span(model, t, other), n_other)
    pts = np.empty((n, n_other, 2))
    pts[..., axis] = a[:, None]
    pts[..., other] = b[None, :]
    rho = np.exp(log_derivatives(model, pts, t).log_rho)
    marg = np.trapezoid(rho, b, axis=1)
    return a, marg / np.trapezoid(marg, a)


def marginal_cdf(model, t, axis=1, n=2001):
    """Callable CDF of the marginal along ``axis``."""
    a, dens = marginal_density(model, t, axis, n)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(a))])
    cdf /= cdf[-1]
    return lambda q: np.interp(q, a, cdf, left=0.0, right=1.0)


def density_transport_check(model, spin, mode, n_samples, t_final, seed=0, config=None):
    """Advect draws from ``rho(., 0)`` to ``t_final`` and KS-test them against ``rho(., t_final)``.

    A single symmetric packet is tested on the radial distance (Rayleigh law
    of scale ``sigma(t)``); other models on the ``y`` marginal.  ``details``
    carries the abort count, which must stay below 0.1 % for the test to count.
    """
    pts = sample_density(model, n_samples, seed)
    if t_final > 0:
        cfg = config or IntegratorConfig((0.0, t_final), rel_tol=1e-8, abs_tol=1e-10)
        if cfg.t_span != (0.0, float(t_final)):
            cfg = IntegratorConfig((0.0, float(t_final)), cfg.rel_tol, cfg.abs_tol, cfg.max_step)
        final, aborted = advect(model, spin, mode, pts, cfg)
    else:
        final, aborted = pts, np.zeros(len(pts), dtype=bool)
    final = final[~aborted]
    details = {"aborted": int(aborted.sum()), "abort_fraction": float(aborted.mean()),
               "n": int(len(final))}
    if model.is_single_packet and model.packets[0].symmetric:
        p = model.packets[0]
        r = np.linalg.norm(final - p.center(t_final), axis=1)
        scale = sigma_of_t(p.sigma0[0], t_final, model.constants)
        ks = stats.kstest(r, stats.rayleigh(scale=scale).cdf)
        counts, edges = np.histogram(r, bins=40)
        details.update(statistic="radial", scale=scale)
    else:
        y = final[:, 1]
        ks = stats.kstest(y, marginal_cdf(model, t_final, axis=1))
        counts, edges = np.histogram(y, bins=40)
        details.update(statistic="y-marginal")
    return HistogramReport(edges, counts, float(ks.statistic), float(ks.pvalue), details)


# -- fringes ---------------------------------------------------------------------

def _positions_at(trajectories, t):
    if isinstance(trajectories, np.ndarray):
        return trajectories.reshape(-1, 2)
    rows = [tr.position_at(t) for tr in trajectories
            if len(tr.t) >= 2 and tr.t[0] <= t <= tr.t[-1]]
    return np.array(rows).reshape(-1, 2)


def fringe_profile(trajectories, t_snapshot, bins=30, model=None, min_expected=5.0):
    """Histogram of ``y`` at ``t_snapshot``, optionally chi-square tested against the model.

    ``trajectories`` is a list of ``Trajectory`` or an ``(N, 2)`` array of
    positions already at ``t_snapshot``.  The outer bins absorb the tails; bins
    with expected counts below ``min_expected`` are merged into neighbours.
    """
    y = _positions_at(trajectories, t_snapshot)[:, 1]
    if model is not None and len(y) < MIN_SAMPLES:
        raise InsufficientSamples(f"need at least {MIN_SAMPLES} positions, got {len(y)}")
    if len(y) == 0:
        raise InsufficientSamples("no trajectory covers the snapshot time")
    edges = np.histogram_bin_edges(y, bins=bins) if np.isscalar(bins) else np.asarray(bins, float)
    inner = edges[1:-1]
    counts = np.bincount(np.searchsorted(inner, y, side="right"), minlength=len(edges) - 1)
    if model is None:
        return HistogramReport(edges, counts, float("nan"), float("nan"), {"n": len(y)})
    cdf = marginal_cdf(model, t_snapshot, axis=1)
    probs = np.diff(np.concatenate([[0.0], cdf(inner), [1.0]]))
    obs, exp = _merge_small(counts.astype(float), probs * len(y), min_expected)
    chi = stats.chisquare(obs, exp)
    return HistogramReport(edges, counts, float(chi.statistic), float(chi.pvalue),
                           {"n": len(y), "bins_used": len(obs), "expected": probs * len(y)})


def _merge_small(obs, exp, min_expected):
    o, e = [], []
    acc_o = acc_e = 0.0
    for oi, ei in zip(obs, exp):
        acc_o += oi
        acc_e += ei
        if acc_e >= min_expected:
            o.append(acc_o)
            e.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0 or acc_o > 0:
        if o:
            o[-1] += acc_o
            e[-1] += acc_e
        else:
            o.append(acc_o)
            e.append(acc_e)
    e = np.array(e)
    return np.array(o), e * (sum(o) / e.sum())


# -- limit monitors -----------------------------------------------------------------

def limit_monitors(model, x, t, spin, constants=None):
    """Spin-significance ratio and ``|grad Q|`` in units of ``hbar^2 / (2 m sigma0^3)``.

    ``sigma0`` is the narrowest initial packet width (1 for a plane wave).
    """
    constants = constants or model.constants
    sample = eval_fields(model, x, t)
    ratio = spin_significance(sample, constants)
    if model.kind == "plane-wave":
        return LimitMonitor(float(ratio), 0.0)
    s0 = min(min(p.sigma0) for p in model.packets)
    ref = constants.hbar ** 2 / (2.0 * constants.mass * s0 ** 3)
    gq = grad_Qprime(model, x, t, spin, SPIN_OFF)
    return LimitMonitor(float(ratio), float(np.linalg.norm(gq)) / ref)


# -- trajectory diagnostics ---------------------------------------------------------

def axis_crossing_count(trajectories, axis="x"):
    return sum(len(tr.crossings(axis)) for tr in trajectories)


def max_chord_deviation(traj):
    """Largest perpendicular distance of the samples from the chord through the end points."""
    a, b = traj.x[0], traj.x[-1]
    d = b - a
    L = np.linalg.norm(d)
    if L == 0:
        return 0.0
    rel = traj.x - a
    return float(np.max(np.abs(rel[:, 0] * d[1] - rel[:, 1] * d[0])) / L)


def path_length(traj):
    return float(np.sum(np.linalg.norm(np.diff(traj.x, axis=0), axis=1)))


def force_consistency(model, spin, mode, traj, stencil=None):
    """Largest ``|m x'' - F|`` over interior samples, relative to ``max |F|``.

    ``x''`` is the central second difference of positions on the (uniform)
    sample grid; ``F`` is ``lorentz_force`` on the trajectory.
    """
    from .quantumfields import DEFAULT_STENCIL

    ts, xs = traj.t, traj.x
    dt = np.diff(ts)
    if len(ts) < 3 or not np.allclose(dt, dt[0], rtol=1e-9, atol=0):
        raise ValueError("force consistency needs at least three uniformly spaced samples")
    h = dt[0]
    acc = (xs[2:] - 2 * xs[1:-1] + xs[:-2]) / h ** 2
    F = lorentz_force(model, xs[1:-1], ts[1:-1], spin, mode, stencil or DEFAULT_STENCIL)[:, :2]
    diff = model.constants.mass * acc - F
    scale = float(np.max(np.linalg.norm(F, axis=1)))
    return float(np.max(np.linalg.norm(diff, axis=1))) / scale, scale


def mirror_asymmetry(points):
    """Hausdorff distance between a point set and its reflection ``y -> -y``."""
    p = np.asarray(points, dtype=float)
    q = p * np.array([1.0, -1.0])
    d = np.linalg.norm(p[:, None, :] - q[None, :, :], axis=-1)
    return float(max(d.min(axis=0).max(), d.min(axis=1).max()))


def overlap_coefficient(model, t):
    """``integral sqrt(rho_1 rho_2)`` of the first two packets' densities at ``t``."""
    p, q = model.packets[:2]
    out = 1.0
    for a in range(2):
        s1 = sigma_of_t(p.sigma0[a], t, model.constants)
        s2 = sigma_of_t(q.sigma0[a], t, model.constants)
        d = p.center(t)[..., a] - q.center(t)[..., a]
        out = out * np.sqrt(2 * s1 * s2 / (s1 ** 2 + s2 ** 2)) * np.exp(-d ** 2 / (4 * (s1 ** 2 + s2 ** 2)))
    return out


def speed_ratio_study(model, trajectories, spike_rel=0.01, overlap_min=1e-6):
    """Speeds relative to the packet frame, normalized by the group speed.

    For each trajectory the packet-frame speed ``|v - u|`` of an isolated
    symmetric packet would stay at ``gamma r0`` (``r0`` = start distance from
    the nearest packet centre).  A spike is a sample departing from that by
    more than ``spike_rel``; the overlap epoch is where the two packets'
    overlap coefficient exceeds ``overlap_min``.
    """
    u = np.asarray(model.packets[0].group_velocity)
    U = float(np.linalg.norm(u))
    c = model.constants
    out = {"max_ratio": 0.0, "max_lab_speed": 0.0, "spikes": 0, "spikes_outside_overlap": 0,
           "first_spike_time": None}
    for tr in trajectories:
        p = min(model.packets, key=lambda q: np.linalg.norm(tr.initial - np.asarray(q.center0)))
        r0 = float(np.linalg.norm(tr.initial - np.asarray(p.center0)))
        inertial = float(c.gamma(p.sigma0[0])) * r0
        rel = np.linalg.norm(tr.v - u, axis=1)
        out["max_ratio"] = max(out["max_ratio"], float(np.max(rel) / U))
        out["max_lab_speed"] = max(out["max_lab_speed"], float(np.max(tr.speed)))
        spike = np.abs(rel - inertial) > spike_rel * inertial
        inside = overlap_coefficient(model, tr.t) > overlap_min
        out["spikes"] += int(spike.sum())
        out["spikes_outside_overlap"] += int((spike & ~inside).sum())
        if spike.any():
            first = float(tr.t[np.argmax(spike)])
            prev = out["first_spike_time"]
            out["first_spike_time"] = first if prev is None else min(prev, first)
    return out
