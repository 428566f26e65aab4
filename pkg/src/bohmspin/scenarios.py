"""Declarative experiment presets and the scenario runner.

A ``ScenarioConfig`` names a wave model, an initial-condition ensemble, the
guidance mode, integration settings and a list of gates.  ``run_scenario``
builds everything, integrates, and evaluates every gate into a report.

All numbers inside a config are dimensionless (lengths in ``sigma0``, times in
``m sigma0^2 / hbar``, speeds in ``hbar / (m sigma0)``).  ``UnitSystem``
converts SI inputs once, at load time.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from . import __version__
from .analysis import (axis_crossing_count, force_consistency, max_chord_deviation,
                       mirror_asymmetry, path_length, speed_ratio_study)
from .ensemble import EnsembleSpec, RingSpec, build_ensemble
from .errors import ValidationError
from .guidance import SPIN_OFF, SPIN_ON, GuidanceMode, SpinVector
from .integrator import (IntegratorConfig, boost_trajectory, closed_form_gaussian_orbit,
                         integrate_ensemble, rotation_angle_alpha)
from .wavefunction import PhysicalConstants, WaveModel

SPEED_OF_LIGHT = 299_792_458.0
ELECTRON_MASS = 9.1093837015e-31
HBAR_SI = 1.054571817e-34


@dataclass(frozen=True)
class UnitSystem:
    """``dimensionless`` or ``SI`` with the three scale constants in SI."""

    kind: str = "dimensionless"
    sigma0_m: Optional[float] = None
    mass_kg: Optional[float] = None
    hbar_Js: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("dimensionless", "SI"):
            raise ValidationError("units", f"unknown unit system {self.kind!r}")
        if self.kind == "SI":
            for key in ("sigma0_m", "mass_kg", "hbar_Js"):
                value = getattr(self, key)
                if value is None or not (np.isfinite(value) and value > 0):
                    raise ValidationError(key, "SI units need a positive value")

    @classmethod
    def electron(cls, sigma0_m=2e-8):
        return cls("SI", sigma0_m, ELECTRON_MASS, HBAR_SI)

    @property
    def is_si(self):
        return self.kind == "SI"

    @property
    def length(self):
        return self.sigma0_m if self.is_si else 1.0

    @property
    def time(self):
        """``m sigma0^2 / hbar``."""
        return self.mass_kg * self.sigma0_m ** 2 / self.hbar_Js if self.is_si else 1.0

    @property
    def speed(self):
        """``hbar / (m sigma0)``; the characteristic speed ``w`` is half of it."""
        return self.hbar_Js / (self.mass_kg * self.sigma0_m) if self.is_si else 1.0

    def c_ratio(self, default=2e5):
        return SPEED_OF_LIGHT / self.speed if self.is_si else default

    def symbol(self, quantity):
        if self.is_si:
            return {"length": "m", "time": "s", "speed": "m/s"}[quantity]
        return {"length": "sigma0", "time": "m sigma0^2/hbar", "speed": "hbar/(m sigma0)"}[quantity]


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one experiment (dimensionless numbers)."""

    name: str
    model: str = "gaussian"
    sigma0: tuple = (1.0, 1.0)
    separation: float = 0.0
    velocity: tuple = (0.0, 0.0)
    weights: tuple = (1.0, 1.0)
    wavevector: tuple = (1.0, 0.0)
    ensemble: EnsembleSpec = field(default_factory=EnsembleSpec)
    spin_term: bool = True
    spin_sign: int = 1
    t_span: tuple = (0.0, 4.0)
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    stride: Optional[float] = 0.04
    boosts: tuple = ()
    compare_modes: bool = False
    gates: tuple = ()
    units: UnitSystem = field(default_factory=UnitSystem)
    c_ratio: float = 2e5
    seed: int = 0
    description: str = ""

    def __post_init__(self):
        if self.model not in ("gaussian", "superposition", "plane-wave"):
            raise ValidationError("model", f"unknown model {self.model!r}")
        sig = np.broadcast_to(np.asarray(self.sigma0, dtype=float), (2,))
        if not np.all(sig > 0) or not np.all(np.isfinite(sig)):
            raise ValidationError("sigma0", "widths must be positive")
        object.__setattr__(self, "sigma0", (float(sig[0]), float(sig[1])))
        if self.model == "superposition" and not self.separation > 0:
            raise ValidationError("separation", "must be positive for a superposition")
        if not self.separation >= 0:
            raise ValidationError("separation", "must be nonnegative")
        if self.spin_sign not in (1, -1):
            raise ValidationError("spin_sign", "must be +1 or -1")
        t0, t1 = (float(v) for v in self.t_span)
        if not t1 > t0:
            raise ValidationError("t1", "must exceed t0")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValidationError("rel_tol", "tolerances must be positive")
        if self.stride is not None and not self.stride > 0:
            raise ValidationError("stride", "must be positive")
        if not self.c_ratio > 0:
            raise ValidationError("c_ratio", "must be positive")
        unknown = set(self.gates) - set(GATES)
        if unknown:
            raise ValidationError("gates", f"unknown gates {sorted(unknown)}")

    # -- builders ---------------------------------------------------------

    @property
    def constants(self):
        return PhysicalConstants(c_ratio=self.c_ratio)

    @property
    def mode(self):
        return SPIN_ON if self.spin_term else SPIN_OFF

    @property
    def spin(self):
        return SpinVector.up(self.constants, self.spin_sign)

    def build_model(self, velocity=None):
        u = self.velocity if velocity is None else velocity
        c = self.constants
        if self.model == "plane-wave":
            return WaveModel.plane_wave(self.wavevector, c)
        if self.model == "superposition":
            return WaveModel.superposition(self.separation, self.sigma0, u,
                                           weights=self.weights, constants=c)
        return WaveModel.gaussian(self.sigma0, velocity=u, constants=c)

    def integrator(self):
        return IntegratorConfig((float(self.t_span[0]), float(self.t_span[1])), self.rel_tol,
                                self.abs_tol, dense_output_stride=self.stride)

    def with_spin(self, on):
        return replace(self, spin_term=bool(on))

    def digest(self):
        blob = json.dumps(asdict(self), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass
class ScenarioResult:
    """Trajectories grouped by run, evaluated gates and provenance."""

    config: ScenarioConfig
    trajectories: list
    groups: dict
    reports: list
    provenance: dict

    @property
    def events(self):
        return [(i, e) for i, tr in enumerate(self.trajectories) for e in tr.events]

    @property
    def passed(self):
        return all(r["passed"] for r in self.reports)

    def group(self, name):
        return [self.trajectories[i] for i in self.groups[name]]


# -- gates ------------------------------------------------------------------

def _report(gate, passed, value, threshold, **details):
    return {"gate": gate, "passed": bool(passed), "value": float(value),
            "threshold": threshold, **details}


def _gate_closed_form(cfg, runs):
    worst = 0.0
    for tr in runs["main"]:
        x, _ = closed_form_gaussian_orbit(tr.initial, tr.t, cfg.constants, cfg.sigma0[0])
        err = np.linalg.norm(tr.x - x, axis=1) / np.linalg.norm(x, axis=1)
        worst = max(worst, float(err.max()))
    return _report("closed-form-orbit", worst < 1e-6, worst, 1e-6)


def _gate_constant_speed(cfg, runs):
    g = float(cfg.constants.gamma(cfg.sigma0[0]))
    worst = 0.0
    for tr in runs["main"]:
        ref = g * np.linalg.norm(tr.initial - np.asarray(cfg.build_model().packets[0].center0))
        worst = max(worst, float(np.max(np.abs(tr.speed - ref)) / ref))
    return _report("constant-speed", worst < 1e-6, worst, 1e-6)


def _gate_linearity(cfg, runs):
    worst = 0.0
    for tr in runs["main"]:
        worst = max(worst, max_chord_deviation(tr) / path_length(tr))
    return _report("linearity", worst < 1e-6, worst, 1e-6)


def _gate_boost(cfg, runs):
    worst = 0.0
    for name, trs in runs.items():
        if not name.startswith("u="):
            continue
        u = np.array([float(name[2:]), 0.0])
        for rest, lab in zip(runs["main"], trs):
            ref = boost_trajectory(rest, u)
            worst = max(worst, float(np.max(np.abs(lab.x - ref.x))))
    return _report("boost-covariance", worst < 1e-6, worst, 1e-6)


def _gate_rotation(cfg, runs):
    worst = 0.0
    center = np.asarray(cfg.build_model().packets[0].center0)
    for name, trs in runs.items():
        if not name.startswith("u="):
            continue
        u = float(name[2:])
        for rest, lab in zip(runs["main"], trs):
            b = rest.v[0] / np.linalg.norm(rest.v[0])
            d = lab.x[-1] - lab.x[0]
            measured = np.arccos(np.clip(b @ d / np.linalg.norm(d), -1.0, 1.0))
            beta = np.arctan2(b[1], b[0])
            r0 = float(np.linalg.norm(rest.initial - center))
            oracle = rotation_angle_alpha(r0, beta, u, cfg.constants, cfg.sigma0[0])
            worst = max(worst, abs(measured - oracle))
    return _report("rotation-angle", worst < 1e-6, worst, 1e-6, unit="rad")


def _gate_mirror(cfg, runs):
    off = mirror_asymmetry(np.array([tr.x[-1] for tr in runs["spin-off"]]))
    on = mirror_asymmetry(np.array([tr.x[-1] for tr in runs["spin-on"]]))
    return _report("mirror-asymmetry", off < 1e-8 and on > 1e-3, on, {"off_max": 1e-8, "on_min": 1e-3},
                   spin_off=off)


def _gate_crossings(cfg, runs):
    n = axis_crossing_count(runs["main"], "x")
    if cfg.spin_term:
        return _report("crossing-dichotomy", n >= 1, n, ">= 1", mode="spin-on")
    return _report("crossing-dichotomy", n == 0, n, "== 0", mode="spin-off")


def _gate_force(cfg, runs):
    model = cfg.build_model()
    worst = 0.0
    for tr in runs["main"][:5]:
        rel, _ = force_consistency(model, cfg.spin, cfg.mode, tr)
        worst = max(worst, rel)
    return _report("force-consistency", worst < 1e-3, worst, 1e-3)


def _gate_speed_ratio(cfg, runs):
    study = speed_ratio_study(cfg.build_model(), runs["main"])
    ok = (study["max_ratio"] < 0.05 and study["max_lab_speed"] < cfg.c_ratio
          and study["spikes_outside_overlap"] == 0)
    return _report("speed-ratio", ok, study["max_ratio"], 0.05, **study)


def _gate_no_aborts(cfg, runs):
    n = sum(tr.aborted for trs in runs.values() for tr in trs)
    return _report("no-aborts", n == 0, n, 0)


GATES = {
    "closed-form-orbit": _gate_closed_form,
    "constant-speed": _gate_constant_speed,
    "linearity": _gate_linearity,
    "boost-covariance": _gate_boost,
    "rotation-angle": _gate_rotation,
    "mirror-asymmetry": _gate_mirror,
    "crossing-dichotomy": _gate_crossings,
    "force-consistency": _gate_force,
    "speed-ratio": _gate_speed_ratio,
    "no-aborts": _gate_no_aborts,
}


# -- presets -----------------------------------------------------------------

TWO_SLIT_RINGS = RingSpec.evenly_spaced(0.4, 6, 1.0, 20)


def _two_slit(name, spin_term, units=None, group_speed=100.0, description=""):
    units = units or UnitSystem()
    return ScenarioConfig(
        name=name, model="superposition", separation=20.0, velocity=(group_speed, 0.0),
        ensemble=EnsembleSpec("canonical-rings", TWO_SLIT_RINGS), spin_term=spin_term,
        t_span=(0.0, 12.0), stride=0.05, gates=("crossing-dichotomy", "no-aborts"),
        units=units, c_ratio=units.c_ratio(), description=description)


def builtin_presets():
    """The seven reference experiments, in figure order."""
    return [
        ScenarioConfig(
            name="fig2-catherine-wheel",
            ensemble=EnsembleSpec("uniform-contour", level=1.0, count=16),
            t_span=(0.0, 4.0), stride=0.04,
            gates=("closed-form-orbit", "constant-speed", "linearity", "no-aborts"),
            description="symmetric packet at rest, 16 starts on r0 = sigma0, spin on"),
        ScenarioConfig(
            name="fig3-boosted",
            ensemble=EnsembleSpec("uniform-contour", level=1.0, count=16),
            t_span=(0.0, 4.0), stride=0.04, boosts=(0.8, 2.0, 5.0),
            gates=("boost-covariance", "rotation-angle", "no-aborts"),
            description="the fig2 ensemble seen from frames moving at 0.8, 2 and 5 w"),
        ScenarioConfig(
            name="fig4-asymmetric-product", sigma0=(2.0, 1.0),
            ensemble=EnsembleSpec("uniform-contour", level=1.0, count=16),
            t_span=(0.0, 40.0), rel_tol=1e-10, abs_tol=1e-12, stride=0.05,
            gates=("force-consistency", "no-aborts"),
            description="product packet with sigma0x = 2 sigma0y, 16 starts on one contour"),
        ScenarioConfig(
            name="fig5-superposition", model="superposition", separation=5.0,
            ensemble=EnsembleSpec("canonical-rings", RingSpec((0.5,), 0.5, 12)),
            t_span=(0.0, 8.0), stride=0.04, compare_modes=True,
            gates=("mirror-asymmetry", "no-aborts"),
            description="two packets 5 sigma0 apart, 12 starts at 0.5 sigma0 each, spin off then on"),
        _two_slit("fig6-two-slit-nospin", False,
                  description="two slits 20 sigma0 apart, canonical rings, spin off"),
        _two_slit("fig7-two-slit-spin", True,
                  description="two slits 20 sigma0 apart, canonical rings, spin on"),
        ScenarioConfig(
            name="fig8-speed-ratio", model="superposition", separation=20.0,
            velocity=(100.0, 0.0),
            ensemble=EnsembleSpec("canonical-rings", RingSpec((1.5,), 1.5, 15), packets=(0,)),
            t_span=(0.0, 12.0), stride=0.01, gates=("speed-ratio", "no-aborts"),
            description="15 starts on the 1.5 sigma0 contour of the upper slit, speeds over time"),
    ]


def preset(name):
    for cfg in builtin_presets():
        if cfg.name == name:
            return cfg
    raise ValidationError("scenario", f"unknown preset {name!r}")


def si_variant(cfg, units=None):
    """The same experiment in SI units; two-slit presets use the literal group speed 1e8 m/s."""
    units = units or UnitSystem.electron()
    velocity = cfg.velocity
    if cfg.model == "superposition" and cfg.separation == 20.0:
        velocity = (1e8 / units.speed, 0.0)
    return replace(cfg, units=units, c_ratio=units.c_ratio(), velocity=velocity)


# -- runner ------------------------------------------------------------------

def run_scenario(config):
    """Build, integrate and gate one scenario.  Deterministic for a fixed config."""
    points = build_ensemble(config.ensemble, config.build_model()) if config.model != "plane-wave" \
        else np.zeros((1, 2))
    if config.ensemble.kind == "density-sample":
        points = build_ensemble(replace(config.ensemble, seed=config.seed), config.build_model())
    icfg = config.integrator()
    runs = {}
    if config.compare_modes:
        for label, cfg in (("spin-off", config.with_spin(False)), ("spin-on", config.with_spin(True))):
            runs[label] = integrate_ensemble(cfg.build_model(), cfg.spin, cfg.mode, points, icfg)
    else:
        runs["main"] = integrate_ensemble(config.build_model(), config.spin, config.mode, points, icfg)
    w = config.constants.characteristic_speed(config.sigma0[0])
    for b in config.boosts:
        u = (b * w, 0.0)
        boosted = config.build_model(velocity=u)
        runs[f"u={u[0]!r}"] = integrate_ensemble(boosted, config.spin, config.mode, points, icfg)

    trajectories, groups = [], {}
    for name, trs in runs.items():
        groups[name] = list(range(len(trajectories), len(trajectories) + len(trs)))
        trajectories.extend(trs)
    reports = [GATES[g](config, runs) for g in config.gates]
    provenance = {"config_hash": config.digest(), "seed": config.seed, "version": __version__,
                  "scenario": config.name}
    return ScenarioResult(config, trajectories, groups, reports, provenance)
