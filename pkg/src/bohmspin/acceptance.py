"""The eleven acceptance criteria as callable checks.

Each ``criterion_N`` returns a ``CriterionResult``; ``run_criteria`` runs a
selection and prints one ``PASS``/``FAIL`` line per criterion.  Thresholds
are fixed here and nowhere else.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .analysis import (density_transport_check, fringe_profile, mean_spin_angular_momentum,
                       speed_distribution_check)
from .ensemble import build_ensemble, ring_counts, gaussian_radial, sample_density, uniform_contour
from .guidance import SPIN_OFF, SPIN_ON, SpinVector
from .integrator import (IntegratorConfig, advect, boost_trajectory, closed_form_gaussian_orbit,
                         integrate_ensemble, rotation_angle_alpha)
from .quantumfields import continuity_residual, hj_residual, lorentz_force, FDStencil
from .scenarios import TWO_SLIT_RINGS, preset, run_scenario
from .wavefunction import PhysicalConstants, WaveModel, log_derivatives, peak_density


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    value: float
    threshold: str
    details: dict = field(default_factory=dict)

    def line(self):
        return (f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number:2d} {self.name}: "
                f"value={self.value:.6g} (need {self.threshold})")


C = PhysicalConstants()
SPIN = SpinVector.up(C)
GAMMA = float(C.gamma(1.0))
W = C.characteristic_speed(1.0)


def criterion_1():
    """Integrated orbits on r0 = sigma0 against the closed form over gamma t in [0, 2]."""
    model = WaveModel.gaussian(1.0, constants=C)
    pts = uniform_contour(model, 1.0, 16)
    trs = integrate_ensemble(model, SPIN, SPIN_ON, pts, IntegratorConfig((0.0, 2.0 / GAMMA),
                                                                         dense_output_stride=0.04))
    pos, spd = 0.0, 0.0
    for tr in trs:
        x, _ = closed_form_gaussian_orbit(tr.initial, tr.t, C)
        pos = max(pos, float(np.max(np.linalg.norm(tr.x - x, axis=1) / np.linalg.norm(x, axis=1))))
        ref = GAMMA * np.linalg.norm(tr.initial)
        spd = max(spd, float(np.max(np.abs(tr.speed - ref)) / ref))
    return CriterionResult(1, "inertial-motion", pos < 1e-6 and spd < 1e-6, max(pos, spd), "< 1e-6",
                           {"position_rel_error": pos, "speed_rel_error": spd})


def criterion_2():
    """In-plane Lorentz force on a 21x21 grid inside r <= 3 sigma0 at t in {0, 2, 6}."""
    model = WaveModel.gaussian(1.0, constants=C)
    g = np.linspace(-3.0, 3.0, 21)
    X, Y = np.meshgrid(g, g, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    pts = pts[np.linalg.norm(pts, axis=1) <= 3.0]
    unit = C.hbar ** 2 / (2 * C.mass)
    worst = 0.0
    for t in (0.0, 2.0, 6.0):
        F = lorentz_force(model, pts, np.full(len(pts), t), SPIN, SPIN_ON)
        worst = max(worst, float(np.max(np.linalg.norm(F[:, :2], axis=1))) / unit)
    return CriterionResult(2, "zero-lorentz-force", worst < 1e-5, worst, "< 1e-5 hbar^2/(2 m sigma0^3)")


def criterion_3():
    """Monte-Carlo mean spin angular momentum equals hbar for two models."""
    models = {"gaussian": WaveModel.gaussian(1.0, constants=C),
              "superposition": WaveModel.superposition(5.0, 1.0, constants=C)}
    details, ok, worst = {}, True, 0.0
    for name, model in models.items():
        est = mean_spin_angular_momentum(model, SPIN, 100_000, seed=1)
        z = abs(est.mean[2] - C.hbar) / est.stderr[2]
        details[name] = {"mean_z": float(est.mean[2]), "stderr_z": float(est.stderr[2]), "z": float(z)}
        ok &= bool(z < 3.0)
        worst = max(worst, float(z))
    return CriterionResult(3, "mean-spin-angular-momentum", ok, worst, "< 3 standard errors", details)


def criterion_4():
    """Speeds of density-sampled trajectories follow Rayleigh(w)."""
    model = WaveModel.gaussian(1.0, constants=C)
    pts = sample_density(model, 10_000, seed=4)
    end, _ = advect(model, SPIN, SPIN_ON, pts, IntegratorConfig((0.0, 1.0 / GAMMA)))
    # speed at the end point from the field (constant along each orbit)
    d = log_derivatives(model, end, 1.0 / GAMMA)
    v = np.column_stack([d.grad_S[:, 0] + SPIN.vector[2] * d.grad_log_rho[:, 1],
                         d.grad_S[:, 1] - SPIN.vector[2] * d.grad_log_rho[:, 0]]) / C.mass
    rep = speed_distribution_check(C, np.linalg.norm(v, axis=1))
    tail = rep.details
    tail_ok = abs(tail["tail_fraction"] - tail["tail_expected"]) < 3 * tail["tail_sigma"]
    return CriterionResult(4, "speed-distribution", rep.p_value > 0.01 and tail_ok, rep.p_value,
                           "KS p > 0.01 and tail within 3 sigma",
                           {"p_value": rep.p_value, **{k: tail[k] for k in
                                                       ("tail_fraction", "tail_expected", "tail_sigma", "mode")}})


def criterion_5():
    """1e5 advected samples reproduce the spread radial law in both modes."""
    model = WaveModel.gaussian(1.0, constants=C)
    details, ok, worst = {}, True, 1.0
    for label, mode in (("spin-on", SPIN_ON), ("spin-off", SPIN_OFF)):
        rep = density_transport_check(model, SPIN, mode, 100_000, 1.0 / GAMMA, seed=5)
        details[label] = {"p_value": rep.p_value, "abort_fraction": rep.details["abort_fraction"],
                          "scale": rep.details["scale"]}
        ok &= rep.p_value > 0.01 and rep.details["abort_fraction"] < 1e-3
        worst = min(worst, rep.p_value)
    return CriterionResult(5, "density-transport", ok, worst, "KS p > 0.01, aborts < 0.1%", details)


def criterion_6():
    """Galilean covariance of integrated paths and the large-boost rotation limit."""
    model = WaveModel.gaussian(1.0, constants=C)
    pts = uniform_contour(model, 1.0, 16)
    cfg = IntegratorConfig((0.0, 4.0), rel_tol=1e-12, abs_tol=1e-12, dense_output_stride=0.04)
    rest = integrate_ensemble(model, SPIN, SPIN_ON, pts, cfg)
    cov = 0.0
    for b in (2.0, 100.0):
        u = np.array([b * W, 0.0])
        lab = integrate_ensemble(model.__class__.gaussian(1.0, velocity=u, constants=C), SPIN, SPIN_ON, pts, cfg)
        for r, l in zip(rest, lab):
            cov = max(cov, float(np.max(np.abs(l.x - boost_trajectory(r, u).x))))
    u = 100.0 * W
    boosted = WaveModel.gaussian(1.0, velocity=(u, 0.0), constants=C)
    angles = {}
    worst = 0.0
    for deg in (0.0, 30.0, 90.0, 150.0):
        beta = np.radians(deg)
        x0 = np.array([np.sin(beta), -np.cos(beta)])  # rest-frame motion along (cos beta, sin beta)
        tr = integrate_ensemble(boosted, SPIN, SPIN_ON, x0[None], cfg)[0]
        d = tr.x[-1] - tr.x[0]
        b = np.array([np.cos(beta), np.sin(beta)])
        alpha = float(np.arccos(np.clip(b @ d / np.linalg.norm(d), -1, 1)))
        oracle = rotation_angle_alpha(1.0, beta, u, C)
        angles[deg] = {"alpha_deg": np.degrees(alpha), "oracle_deg": np.degrees(oracle),
                       "abs_diff_deg": abs(np.degrees(alpha) - deg)}
        worst = max(worst, abs(np.degrees(alpha) - deg))
    ok = cov < 1e-6 and worst < 0.5
    return CriterionResult(6, "galilean-boost", ok, worst, "covariance < 1e-6 and |alpha - beta| < 0.5 deg",
                           {"covariance_error": cov, "angles": angles})


def _two_slit_crossings(spin_on, rel_tol):
    cfg = replace(preset("fig7-two-slit-spin" if spin_on else "fig6-two-slit-nospin"), rel_tol=rel_tol)
    res = run_scenario(cfg)
    return sum(len(tr.crossings("x")) for tr in res.trajectories), sum(tr.aborted for tr in res.trajectories)


def criterion_7():
    """Axis crossings: none with the spin term off, some with it on, stable under tighter tolerance."""
    counts = ring_counts(TWO_SLIT_RINGS, gaussian_radial(1.0))
    base = preset("fig7-two-slit-spin").rel_tol
    res = {}
    for on in (False, True):
        for tol in (base, base / 2):
            res[(on, tol)] = _two_slit_crossings(on, tol)[0]
    off = (res[(False, base)], res[(False, base / 2)])
    on_ = (res[(True, base)], res[(True, base / 2)])
    ok = (counts == [30, 24, 16, 9, 4, 2] and off == (0, 0) and on_[0] >= 1 and on_[0] == on_[1])
    return CriterionResult(7, "two-slit-dichotomy", ok, on_[0], "off == 0, on >= 1, stable",
                           {"ring_counts": counts, "spin_off": off, "spin_on": on_})


def criterion_8():
    """Far-field y-histogram of 1e4 two-slit trajectories against the exact marginal."""
    cfg = preset("fig7-two-slit-spin")
    model = cfg.build_model()
    t_snap = cfg.t_span[1]
    pts = sample_density(model, 10_000, seed=8)
    end, aborted = advect(model, cfg.spin, cfg.mode, pts, IntegratorConfig((0.0, t_snap)))
    rep = fringe_profile(end[~aborted], t_snap, bins=40, model=model)
    return CriterionResult(8, "fringe-recovery", rep.p_value > 0.01, rep.p_value, "chi-square p > 0.01",
                           {"chi2": rep.test_statistic, "bins_used": rep.details["bins_used"],
                            "aborted": int(aborted.sum()), "t_snapshot": t_snap})


def criterion_9():
    """Continuity and Hamilton-Jacobi residuals at 100 density-sampled points per model."""
    models = {
        "symmetric": WaveModel.gaussian(1.0, constants=C),
        "asymmetric-product": WaveModel.gaussian((2.0, 1.0), constants=C),
        "superposition": WaveModel.superposition(5.0, 1.0, constants=C),
    }
    stencil = FDStencil()
    details, worst = {}, 0.0
    for name, model in models.items():
        t = 1.0
        pts = sample_density(model, 400, seed=9, t=t)
        rho = np.exp(log_derivatives(model, pts, t).log_rho)
        pts = pts[rho > 1e-6 * peak_density(model, t)][:100]
        cont = float(np.max(np.abs(continuity_residual(model, pts, t, SPIN, stencil, SPIN_ON))))
        hj = float(np.max(np.abs(hj_residual(model, pts, t, stencil))))
        details[name] = {"continuity": cont, "hamilton_jacobi": hj, "points": len(pts)}
        worst = max(worst, cont, hj)
    return CriterionResult(9, "residual-identities", worst < 1e-5, worst, "< 1e-5", details)


def criterion_10():
    """Finite-difference acceleration equals the Lorentz-like force (and -grad Q with spin off)."""
    from .analysis import force_consistency

    base = preset("fig4-asymmetric-product")
    details, worst = {}, 0.0
    for on in (True, False):
        cfg = base.with_spin(on)
        model = cfg.build_model()
        pts = build_ensemble(cfg.ensemble, model)[:5]
        trs = integrate_ensemble(model, cfg.spin, cfg.mode, pts, cfg.integrator())
        rel = max(force_consistency(model, cfg.spin, cfg.mode, tr)[0] for tr in trs)
        details["spin-on" if on else "spin-off"] = rel
        worst = max(worst, rel)
    return CriterionResult(10, "force-law-consistency", worst < 1e-3, worst, "< 1e-3 relative", details)


def criterion_11():
    """Packet-frame speed ratio on the 1.5 sigma0 contour of one slit."""
    res = run_scenario(preset("fig8-speed-ratio"))
    rep = next(r for r in res.reports if r["gate"] == "speed-ratio")
    return CriterionResult(11, "speed-ratio-bound", rep["passed"], rep["max_ratio"],
                           "< 0.05, |v| < c, spikes only during overlap",
                           {k: rep[k] for k in ("max_ratio", "max_lab_speed", "spikes",
                                                "spikes_outside_overlap", "first_spike_time")})


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 12)}


def run_criteria(only=None, stream=None):
    """Run the selected criteria (all by default) and print one line each."""
    stream = stream or sys.stdout
    results = []
    for n in (only or sorted(CRITERIA)):
        start = time.perf_counter()
        r = CRITERIA[n]()
        r.details["seconds"] = round(time.perf_counter() - start, 2)
        print(r.line(), file=stream, flush=True)
        results.append(r)
    return results
