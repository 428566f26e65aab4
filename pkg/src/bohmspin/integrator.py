"""Trajectory integration for the guidance flow.

Batches of trajectories are advanced together by an explicit Dormand-Prince
5(4) pair.  Every trajectory keeps its own time, step size and error history,
so a trajectory's path does not depend on which other trajectories share the
batch.  Step sizes follow a PI controller; samples on a fixed time grid come
from the pair's fourth-order continuous extension, and axis crossings are
located by bisection on that interpolant.

Near nodes the step is rejected while the density at the proposed point is
below ``10 x`` the node floor; a trajectory whose step collapses, or that
lands below the floor, ends with a ``node-abort`` event.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .guidance import SPIN_ON, as_mode
from .wavefunction import NODE_FLOOR, log_derivatives, peak_density

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# continuous extension: y(t + th h) = y + h sum_i k_i (P_i . [th, th^2, th^3, th^4])
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_SAFETY = 0.9
_BETA = 0.04
_EXPO = 0.2 - 0.75 * _BETA
_FAC_MIN = 0.2
_FAC_MAX = 10.0

OK, NEAR_NODE, NODE = 0, 1, 2


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances, time span and recording options.

    ``dense_output_stride=None`` records every accepted step; otherwise samples
    fall on ``t0 + k * stride`` plus the final time.  ``crossing_axes`` lists the
    coordinate axes whose crossings are recorded: ``"x"`` is the line ``y = 0``,
    ``"y"`` the line ``x = 0``.
    """

    t_span: tuple = (0.0, 4.0)
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_step: float = np.inf
    dense_output_stride: Optional[float] = None
    event_tol: float = 1e-10
    crossing_axes: tuple = ("x",)
    subluminal_threshold: float = 0.1
    max_iterations: int = 1_000_000

    def __post_init__(self):
        t0, t1 = (float(v) for v in self.t_span)
        object.__setattr__(self, "t_span", (t0, t1))
        if not t1 > t0:
            raise ValueError(f"t_span must be increasing, got {self.t_span}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")
        if self.dense_output_stride is not None and not self.dense_output_stride > 0:
            raise ValueError("dense_output_stride must be positive")
        for axis in self.crossing_axes:
            if axis not in ("x", "y"):
                raise ValueError(f"unknown crossing axis {axis!r}")

    def sample_times(self):
        t0, t1 = self.t_span
        if self.dense_output_stride is None:
            return None
        n = int(np.floor((t1 - t0) / self.dense_output_stride * (1 + 1e-12)))
        grid = t0 + self.dense_output_stride * np.arange(n + 1)
        if t1 - grid[-1] > 1e-9 * self.dense_output_stride:
            grid = np.append(grid, t1)
        else:
            grid[-1] = t1
        return grid


@dataclass(frozen=True)
class Event:
    kind: str
    t: float
    x: tuple
    axis: Optional[str] = None
    margin: Optional[float] = None


@dataclass
class Trajectory:
    """Sampled path: times ``t`` (n,), positions ``x`` (n, 2), velocities ``v`` (n, 2)."""

    initial: np.ndarray
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    events: list = field(default_factory=list)

    @property
    def speed(self):
        return np.linalg.norm(self.v, axis=-1)

    @property
    def aborted(self):
        return any(e.kind == "node-abort" for e in self.events)

    @property
    def samples(self):
        return list(zip(self.t, self.x, self.v, self.speed))

    def crossings(self, axis="x"):
        return [e for e in self.events if e.kind == "axis-crossing" and e.axis == axis]

    def position_at(self, t):
        """Cubic Hermite interpolation between samples (positions and velocities)."""
        return _hermite_eval(self.t, self.x, self.v, np.asarray(t, dtype=float))


def _hermite_eval(ts, xs, vs, t):
    i = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(ts) - 2)
    h = ts[i + 1] - ts[i]
    s = ((t - ts[i]) / h)[..., None]
    h = h[..., None]
    h00 = 2 * s ** 3 - 3 * s ** 2 + 1
    h10 = s ** 3 - 2 * s ** 2 + s
    h01 = -2 * s ** 3 + 3 * s ** 2
    h11 = s ** 3 - s ** 2
    return h00 * xs[i] + h10 * h * vs[i] + h01 * xs[i + 1] + h11 * h * vs[i + 1]


# -- velocity field ------------------------------------------------------------

def velocity_field(model, spin, mode=SPIN_ON):
    """Vectorized guidance field ``f(t, x) -> (v, status)``.

    ``status`` is ``NODE`` below the node floor (``v`` is NaN there),
    ``NEAR_NODE`` below ten times the floor, else ``OK``.
    """
    if not spin.along_z:
        raise ValueError("planar trajectories need the spin along +z or -z")
    spin_on = as_mode(mode).spin_term
    sz = spin.vector[2] if spin_on else 0.0
    hbar, m = model.constants.hbar, model.constants.mass

    def f(t, x):
        d = log_derivatives(model, x, t)
        g = d.grad
        gl = 2.0 * g.real
        v = np.empty(x.shape)
        v[:, 0] = (hbar * g[:, 0].imag + sz * gl[:, 1]) / m
        v[:, 1] = (hbar * g[:, 1].imag - sz * gl[:, 0]) / m
        log_floor = np.log(NODE_FLOOR * peak_density(model, t))
        lr = d.log_rho
        status = np.where(lr >= log_floor + np.log(10.0), OK,
                          np.where(lr >= log_floor, NEAR_NODE, NODE))
        bad = (status == NODE) | ~np.all(np.isfinite(v), axis=1)
        status[bad] = NODE
        v[bad] = np.nan
        return v, status

    return f


# -- stepping ------------------------------------------------------------------

def _rms(z):
    return np.sqrt(np.mean(z ** 2, axis=-1))


def _initial_step(f, t, y, f0, t1, cfg):
    sc = cfg.abs_tol + cfg.rel_tol * np.abs(y)
    d0 = _rms(y / sc)
    d1 = _rms(f0 / sc)
    h0 = np.where((d0 < 1e-5) | (d1 < 1e-5), 1e-6, 0.01 * d0 / np.maximum(d1, 1e-300))
    h0 = np.minimum(h0, t1 - t)
    f1, _ = f(t + h0, y + h0[:, None] * f0)
    d2 = _rms((f1 - f0) / sc) / h0
    dmax = np.maximum(d1, d2)
    h1 = np.where(dmax <= 1e-15, np.maximum(1e-6, h0 * 1e-3),
                  (0.01 / np.maximum(dmax, 1e-300)) ** 0.2)
    h = np.minimum(100 * h0, h1)
    h = np.where(np.isfinite(h), h, h0)
    return np.minimum(np.minimum(h, cfg.max_step), t1 - t)


def _dense(y_old, h, K, theta):
    """Interpolant at fraction ``theta`` for each row; K has shape (7, n, 2)."""
    powers = np.stack([theta, theta ** 2, theta ** 3, theta ** 4], axis=-1)  # (n, 4)
    coef = powers @ _P.T  # (n, 7)
    return y_old + h[:, None] * np.einsum("ni,ind->nd", coef, K)


def _bisect(fun, lo, hi, tol):
    """Root of ``fun`` on [lo, hi] (sign change assumed), to width ``tol``."""
    flo = fun(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = fun(mid)
        if fm == 0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


_AXIS_COMPONENT = {"x": 1, "y": 0}


class _Recorder:
    """Collects samples and events for a batch."""

    def __init__(self, n, cfg, constants):
        self.cfg = cfg
        self.grid = cfg.sample_times()
        self.next_k = np.ones(n, dtype=int)
        self.chunks = []
        self.events = [[] for _ in range(n)]
        self.warned = np.zeros(n, dtype=bool)
        self.c = constants.c_ratio

    def start(self, ids, t, y, v):
        self.chunks.append((ids, np.full(len(ids), t), y.copy(), v.copy()))

    def step(self, f, ids, t_old, h, y_old, K, y_new, v_new):
        t_new = t_old + h
        if self.grid is None:
            self.chunks.append((ids, t_new, y_new.copy(), v_new.copy()))
        else:
            k_end = np.searchsorted(self.grid, t_new, side="right")
            k_start = self.next_k[ids]
            counts = np.maximum(k_end - k_start, 0)
            if counts.any():
                rows = np.repeat(np.arange(len(ids)), counts)
                ks = np.concatenate([np.arange(a, b) for a, b in zip(k_start, k_end) if b > a])
                ts = self.grid[ks]
                theta = (ts - t_old[rows]) / h[rows]
                exact = ts == t_new[rows]
                pts = _dense(y_old[rows], h[rows], K[:, rows], theta)
                pts[exact] = y_new[rows][exact]
                vs, _ = f(ts, pts)
                vs[exact] = v_new[rows][exact]
                self.chunks.append((ids[rows], ts, pts, vs))
            self.next_k[ids] = np.maximum(k_end, k_start)
        for axis in self.cfg.crossing_axes:
            comp = _AXIS_COMPONENT[axis]
            a, b = y_old[:, comp], y_new[:, comp]
            hit = np.nonzero(((a < 0) & (b >= 0)) | ((a > 0) & (b <= 0)))[0]
            for r in hit:
                yo, hr, Kr = y_old[r:r + 1], h[r:r + 1], K[:, r:r + 1]
                fn = lambda th: _dense(yo, hr, Kr, np.array([th]))[0, comp]
                th = _bisect(fn, 0.0, 1.0, self.cfg.event_tol / hr[0])
                tc = t_old[r] + th * hr[0]
                xc = _dense(yo, hr, Kr, np.array([th]))[0]
                self.events[ids[r]].append(Event("axis-crossing", float(tc), tuple(xc), axis=axis))
        margin = 0.5 * np.linalg.norm(v_new, axis=1) / self.c
        over = np.nonzero((margin > self.cfg.subluminal_threshold) & ~self.warned[ids])[0]
        for r in over:
            self.warned[ids[r]] = True
            self.events[ids[r]].append(Event("subluminal-warning", float(t_new[r]),
                                             tuple(y_new[r]), margin=float(margin[r])))

    def abort(self, i, t, y):
        self.events[i].append(Event("node-abort", float(t), tuple(y)))

    def build(self, points):
        n = len(points)
        if self.chunks:
            ids = np.concatenate([c[0] for c in self.chunks])
            ts = np.concatenate([c[1] for c in self.chunks])
            xs = np.concatenate([c[2] for c in self.chunks])
            vs = np.concatenate([c[3] for c in self.chunks])
            order = np.lexsort((ts, ids))
            ids, ts, xs, vs = ids[order], ts[order], xs[order], vs[order]
            bounds = np.searchsorted(ids, np.arange(n + 1))
        else:
            ids = ts = np.empty(0)
            xs = vs = np.empty((0, 2))
            bounds = np.zeros(n + 1, dtype=int)
        out = []
        for i in range(n):
            s = slice(bounds[i], bounds[i + 1])
            evs = sorted(self.events[i], key=lambda e: e.t)
            out.append(Trajectory(np.array(points[i], dtype=float), ts[s].copy(), xs[s].copy(),
                                  vs[s].copy(), evs))
        return out


def _solve(f, points, cfg, constants, record=True):
    """Integrate all rows of ``points`` over ``cfg.t_span``.

    Returns final positions, final times, a status array (0 finished, 2
    aborted) and the recorder (or ``None``).
    """
    y = np.array(points, dtype=float).reshape(-1, 2)
    n = len(y)
    t0, t1 = cfg.t_span
    span = t1 - t0
    h_min = 1e-12 * span
    t = np.full(n, t0)
    status = np.zeros(n, dtype=int)  # 0 running/finished, 2 aborted
    rec = _Recorder(n, cfg, constants) if record else None
    if n == 0:
        return y, t, status, rec
    k1, st = f(t, y)
    dead = st == NODE
    status[dead] = NODE
    if rec is not None:
        for i in np.nonzero(dead)[0]:
            rec.abort(i, t0, y[i])
        live = np.nonzero(~dead)[0]
        rec.start(live, t0, y[live], k1[live])
    running = ~dead
    h = np.zeros(n)
    if running.any():
        r = np.nonzero(running)[0]
        h[r] = _initial_step(f, t[r], y[r], k1[r], t1, cfg)
    fac_old = np.full(n, 1e-4)
    last_rejected = np.zeros(n, dtype=bool)

    for _ in range(cfg.max_iterations):
        idx = np.nonzero(running)[0]
        if len(idx) == 0:
            break
        ti, yi = t[idx], y[idx]
        hi = np.minimum(np.minimum(h[idx], cfg.max_step), t1 - ti)
        K = np.empty((7, len(idx), 2))
        K[0] = k1[idx]
        bad = np.zeros(len(idx), dtype=bool)
        for s in range(1, 7):
            ys = yi + hi[:, None] * np.tensordot(_A[s], K[:s], axes=(0, 0))
            K[s], st = f(ti + _C[s] * hi, ys)
            bad |= st == NODE
        # stage 7 sits at the new point (FSAL)
        y_new = yi + hi[:, None] * np.tensordot(_B[:6], K[:6], axes=(0, 0))
        near = st != OK
        sc = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(yi), np.abs(y_new))
        err = _rms(hi[:, None] * np.tensordot(_E, K, axes=(0, 0)) / sc)
        err = np.where(bad | ~np.isfinite(err), np.inf, err)
        accept = (err <= 1.0) & ~near

        # step-size update
        fac11 = np.where(np.isfinite(err), np.maximum(err, 1e-300) ** _EXPO, np.inf)
        fac = fac11 / fac_old[idx] ** _BETA
        fac = np.clip(fac / _SAFETY, 1.0 / _FAC_MAX, 1.0 / _FAC_MIN)
        h_acc = hi / fac
        h_acc = np.where(last_rejected[idx], np.minimum(h_acc, hi), h_acc)
        h_rej = hi / np.minimum(1.0 / _FAC_MIN, fac11 / _SAFETY)
        h_rej = np.where(near & np.isfinite(err) & (err <= 1.0), 0.25 * hi, h_rej)

        a = idx[accept]
        if len(a):
            if rec is not None:
                rec.step(f, a, ti[accept], hi[accept], yi[accept], K[:, accept],
                         y_new[accept], K[6][accept])
            t[a] = np.where(hi[accept] == t1 - ti[accept], t1, ti[accept] + hi[accept])
            y[a] = y_new[accept]
            k1[a] = K[6][accept]
            fac_old[a] = np.maximum(err[accept], 1e-4)
            h[a] = h_acc[accept]
            last_rejected[a] = False
            running[a[t[a] >= t1]] = False
        rj = idx[~accept]
        if len(rj):
            h[rj] = h_rej[~accept]
            last_rejected[rj] = True
            collapsed = rj[h[rj] < h_min]
            for i in collapsed:
                status[i] = NODE
                running[i] = False
                if rec is not None:
                    rec.abort(i, t[i], y[i])
    else:
        raise RuntimeError("integration did not finish within max_iterations")
    return y, t, status, rec


# -- public API ----------------------------------------------------------------

def integrate_ensemble(model, spin, mode, points, config):
    """Integrate every initial point; output order follows input order."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    f = velocity_field(model, spin, mode)
    _, _, _, rec = _solve(f, pts, config, model.constants, record=True)
    return rec.build(pts)


def integrate_trajectory(model, spin, mode, x0, config):
    """Single trajectory from ``x0``; a node abort ends it early with a ``node-abort`` event."""
    return integrate_ensemble(model, spin, mode, np.asarray(x0, dtype=float)[None, :], config)[0]


def advect(model, spin, mode, points, config):
    """Final positions at ``t_span[1]`` without recording; returns ``(positions, aborted)``."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    f = velocity_field(model, spin, mode)
    y, _, status, _ = _solve(f, pts, config, model.constants, record=False)
    return y, status == NODE


def closed_form_gaussian_orbit(x0, t, constants=None, sigma0=1.0):
    """Exact spin-on orbit in the rest frame of a symmetric packet centred at the origin.

    ``x = (x0 - y0 g t, y0 + x0 g t)`` and ``v = g (-y0, x0)`` with
    ``g = hbar / (2 m sigma0^2)``.  Broadcasts over ``x0`` (..., 2) and ``t``.
    """
    from .wavefunction import PhysicalConstants

    constants = constants or PhysicalConstants()
    g = float(constants.gamma(sigma0))
    x0 = np.asarray(x0, dtype=float)
    gt = g * np.asarray(t, dtype=float)[..., None]
    perp = np.stack([-x0[..., 1], x0[..., 0]], axis=-1)
    return x0 + perp * gt, np.broadcast_to(g * perp, np.broadcast_shapes(x0.shape, gt.shape)).copy()


def boost_trajectory(traj, u, crossing_axes=("x",), event_tol=1e-10):
    """Lab-frame view ``x'(t) = x(t) + u t`` of a trajectory; crossings are recomputed."""
    u = np.asarray(u, dtype=float)
    xs = traj.x + traj.t[:, None] * u
    vs = traj.v + u
    events = [replace(e, x=tuple(np.asarray(e.x) + u * e.t)) for e in traj.events
              if e.kind != "axis-crossing"]
    for axis in crossing_axes:
        comp = _AXIS_COMPONENT[axis]
        a, b = xs[:-1, comp], xs[1:, comp]
        for i in np.nonzero(((a < 0) & (b >= 0)) | ((a > 0) & (b <= 0)))[0]:
            seg_t, seg_x, seg_v = traj.t[i:i + 2], xs[i:i + 2], vs[i:i + 2]
            fn = lambda s: _hermite_eval(seg_t, seg_x, seg_v, np.array([s]))[0, comp]
            tc = _bisect(fn, seg_t[0], seg_t[1], event_tol)
            xc = _hermite_eval(seg_t, seg_x, seg_v, np.array([tc]))[0]
            events.append(Event("axis-crossing", float(tc), tuple(xc), axis=axis))
    events.sort(key=lambda e: e.t)
    return Trajectory(traj.initial.copy(), traj.t.copy(), xs, vs, events)


def rotation_angle_alpha(r0, beta, u, constants=None, sigma0=1.0):
    """Angle between a rest-frame orbit direction and its lab-frame direction.

    The rest-frame direction makes angle ``beta`` with the boost; the lab
    direction is the vector sum ``g r0 b + u`` with ``g = hbar / (2 m sigma0^2)``.
    """
    from .wavefunction import PhysicalConstants

    constants = constants or PhysicalConstants()
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    g = float(constants.gamma(sigma0))
    b = np.array([np.cos(beta), np.sin(beta)])
    lab = g * r0 * b + np.array([u, 0.0])
    cosang = float(b @ lab) / float(np.linalg.norm(lab))
    return float(np.arccos(np.clip(cosang, -1.0, 1.0)))
