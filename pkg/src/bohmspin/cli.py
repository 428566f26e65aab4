"""Command-line front end: ``bohmspin run|list-presets|verify|plot``.

Config files are flat ``key = value`` lines with ``#`` comments and bracketed
section headers.  Top-level keys come before the first section::

    scenario = fig7-two-slit-spin      # preset to start from
    seed = 3
    units = dimensionless              # or SI

    [two-slit]
    separation = 20                    # sigma0 (m in SI)
    group_speed = 100                  # hbar/(m sigma0) (m/s in SI)

    [integrator]
    t1 = 12                            # m sigma0^2/hbar (s in SI)

Unknown sections or keys are errors.  See ``CONFIG_KEYS`` for the full list.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .ensemble import EnsembleSpec, RingSpec
from .errors import ConfigError, ParseError, ValidationError
from .scenarios import ScenarioConfig, UnitSystem, builtin_presets, preset, run_scenario, si_variant

TRAJECTORY_COLUMNS = ("traj_id", "t", "x", "y", "vx", "vy", "speed")
EVENT_COLUMNS = ("traj_id", "kind", "t", "x", "y")

# section -> key -> (kind of quantity, description)
CONFIG_KEYS = {
    "": {
        "scenario": ("name", "preset to start from"),
        "name": ("name", "label for the run"),
        "seed": ("int", "seed for density-sampled ensembles"),
        "units": ("name", "dimensionless or SI"),
    },
    "model": {
        "kind": ("name", "gaussian, superposition or plane-wave"),
        "sigma0": ("length", "initial width, both axes"),
        "sigma0_x": ("length", "initial width along x"),
        "sigma0_y": ("length", "initial width along y"),
        "velocity_x": ("speed", "group velocity, x"),
        "velocity_y": ("speed", "group velocity, y"),
        "wavevector_x": ("wavenumber", "plane-wave k, x"),
        "wavevector_y": ("wavenumber", "plane-wave k, y"),
    },
    "two-slit": {
        "separation": ("length", "distance between packet centres"),
        "group_speed": ("speed", "common group speed along x"),
    },
    "ensemble": {
        "kind": ("name", "canonical-rings, uniform-contour or density-sample"),
        "count": ("int", "number of points"),
        "level": ("ratio", "contour radius in packet widths"),
        "radii": ("ratios", "ring radii in packet widths"),
        "reference_radius": ("ratio", "ring normalization radius in packet widths"),
        "reference_count": ("int", "points on the normalization ring"),
        "packets": ("ints", "packet indices that receive rings"),
    },
    "integrator": {
        "t0": ("time", "start time"),
        "t1": ("time", "end time"),
        "stride": ("time", "sample interval"),
        "rel_tol": ("ratio", "relative tolerance"),
        "abs_tol": ("ratio", "absolute tolerance in packet widths"),
    },
    "guidance": {
        "spin": ("switch", "on or off"),
        "spin_sign": ("int", "+1 or -1"),
    },
    "units": {
        "sigma0_m": ("ratio", "length unit in m"),
        "mass_kg": ("ratio", "particle mass in kg"),
        "hbar_js": ("ratio", "reduced Planck constant in J s"),
    },
}

_TOP = "__top__"


# -- parsing -------------------------------------------------------------------

def _read_sections(path):
    text = Path(path).read_text()
    parser = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#",),
                                       inline_comment_prefixes=("#",), strict=True,
                                       interpolation=None, default_section="__none__")
    try:
        # one synthetic header line carries the top-level keys
        parser.read_string(f"[{_TOP}]\n" + text, source=str(path))
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ParseError(f"expected 'key = value', got {line.strip()!r}", lineno - 1) from None
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
        raise ParseError(exc.message.split(": ", 1)[-1], (exc.lineno or 1) - 1) from None
    except configparser.Error as exc:
        raise ParseError(str(exc), None) from None
    out = {}
    for section in parser.sections():
        name = "" if section == _TOP else section
        if name not in CONFIG_KEYS:
            raise ValidationError(f"[{name}]", "unknown section")
        for key, value in parser.items(section):
            if key not in CONFIG_KEYS[name]:
                raise ValidationError(key if not name else f"{name}.{key}", "unknown key")
            out[(name, key)] = value.strip()
    return out


def _number(key, value, integer=False):
    try:
        x = int(value) if integer else float(value)
    except ValueError:
        raise ValidationError(key, f"expected a number, got {value!r}") from None
    if not np.isfinite(x):
        raise ValidationError(key, "must be finite")
    return x


def _numbers(key, value, integer=False):
    return tuple(_number(key, v.strip(), integer) for v in value.split(",") if v.strip())


def config_from_mapping(values):
    """Turn parsed ``{(section, key): text}`` into a validated ``ScenarioConfig``."""
    get = values.get
    name = get(("", "scenario"), "fig2-catherine-wheel")
    base = preset(name)
    units_kind = get(("", "units"), "dimensionless")
    if units_kind not in ("dimensionless", "SI"):
        raise ValidationError("units", f"expected dimensionless or SI, got {units_kind!r}")
    units = UnitSystem()
    if units_kind == "SI":
        consts = {}
        for key, attr in (("sigma0_m", "sigma0_m"), ("mass_kg", "mass_kg"), ("hbar_js", "hbar_Js")):
            if ("units", key) not in values:
                raise ValidationError(f"units.{key}", "required when units = SI")
            consts[attr] = _number(f"units.{key}", values[("units", key)])
        units = UnitSystem("SI", **consts)
        base = si_variant(base, units)
    scale = {"length": units.length, "time": units.time, "speed": units.speed,
             "wavenumber": 1.0 / units.length}

    def phys(section, key, kind):
        raw = _number(f"{section}.{key}", values[(section, key)])
        return raw / scale[kind]

    changes = {}
    if ("", "name") in values:
        changes["name"] = values[("", "name")]
    if ("", "seed") in values:
        changes["seed"] = _number("seed", values[("", "seed")], integer=True)
    if ("model", "kind") in values:
        changes["model"] = values[("model", "kind")]
    sig = list(base.sigma0)
    if ("model", "sigma0") in values:
        sig = [phys("model", "sigma0", "length")] * 2
    for i, key in enumerate(("sigma0_x", "sigma0_y")):
        if ("model", key) in values:
            sig[i] = phys("model", key, "length")
    if any(s <= 0 for s in sig):
        raise ValidationError("model.sigma0", "must be positive")
    changes["sigma0"] = tuple(sig)
    vel = list(base.velocity)
    for i, key in enumerate(("velocity_x", "velocity_y")):
        if ("model", key) in values:
            vel[i] = phys("model", key, "speed")
    if ("two-slit", "group_speed") in values:
        vel = [phys("two-slit", "group_speed", "speed"), 0.0]
    changes["velocity"] = tuple(vel)
    k = list(base.wavevector)
    for i, key in enumerate(("wavevector_x", "wavevector_y")):
        if ("model", key) in values:
            k[i] = phys("model", key, "wavenumber")
    changes["wavevector"] = tuple(k)
    if ("two-slit", "separation") in values:
        sep = phys("two-slit", "separation", "length")
        if not sep > 0:
            raise ValidationError("separation", f"must be positive, got {values[('two-slit', 'separation')]}")
        changes["separation"] = sep
        changes.setdefault("model", "superposition")

    ens = base.ensemble
    e = {}
    if ("ensemble", "kind") in values:
        e["kind"] = values[("ensemble", "kind")]
    if ("ensemble", "count") in values:
        e["count"] = _number("ensemble.count", values[("ensemble", "count")], integer=True)
    if ("ensemble", "level") in values:
        e["level"] = _number("ensemble.level", values[("ensemble", "level")])
    if ("ensemble", "packets") in values:
        e["packets"] = _numbers("ensemble.packets", values[("ensemble", "packets")], integer=True)
    rings = ens.rings or RingSpec()
    r = {}
    if ("ensemble", "radii") in values:
        r["radii"] = _numbers("ensemble.radii", values[("ensemble", "radii")])
    if ("ensemble", "reference_radius") in values:
        r["reference_radius"] = _number("ensemble.reference_radius", values[("ensemble", "reference_radius")])
    if ("ensemble", "reference_count") in values:
        r["reference_count"] = _number("ensemble.reference_count",
                                       values[("ensemble", "reference_count")], integer=True)
    try:
        if r:
            e["rings"] = replace(rings, **r)
        if e:
            kind = e.get("kind", ens.kind)
            if kind == "canonical-rings" and "rings" not in e:
                e["rings"] = rings
            ens = replace(ens, **e)
    except ValueError as exc:
        raise ValidationError("ensemble", str(exc)) from None
    changes["ensemble"] = ens

    t0, t1 = base.t_span
    if ("integrator", "t0") in values:
        t0 = phys("integrator", "t0", "time")
    if ("integrator", "t1") in values:
        t1 = phys("integrator", "t1", "time")
    changes["t_span"] = (t0, t1)
    if ("integrator", "stride") in values:
        changes["stride"] = phys("integrator", "stride", "time")
    for key in ("rel_tol", "abs_tol"):
        if ("integrator", key) in values:
            changes[key] = _number(f"integrator.{key}", values[("integrator", key)])
    if ("guidance", "spin") in values:
        changes["spin_term"] = _switch("guidance.spin", values[("guidance", "spin")])
    if ("guidance", "spin_sign") in values:
        changes["spin_sign"] = _number("guidance.spin_sign", values[("guidance", "spin_sign")], integer=True)
    return replace(base, **changes)


def _switch(key, value):
    if value.lower() in ("on", "true", "yes", "1"):
        return True
    if value.lower() in ("off", "false", "no", "0"):
        return False
    raise ValidationError(key, f"expected on or off, got {value!r}")


def parse_config(path):
    """Read a config file into a ``ScenarioConfig``.

    Raises
    ------
    ParseError
        Malformed line (message carries the line number).
    ValidationError
        Unknown key or invalid value (message names the key).
    """
    return config_from_mapping(_read_sections(path))


# -- output --------------------------------------------------------------------

@dataclass
class OutputBundle:
    directory: Path
    trajectories: Path
    events: Path
    reports: Path
    manifest: Path
    plots: list = field(default_factory=list)


def _fmt(x):
    return repr(float(x))


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _trajectory_rows(result):
    u = result.config.units
    rows = []
    for i, tr in enumerate(result.trajectories):
        order = np.argsort(tr.t, kind="stable")
        for j in order:
            x = tr.x[j] * u.length
            v = tr.v[j] * u.speed
            rows.append((i, tr.t[j] * u.time, x[0], x[1], v[0], v[1], float(np.hypot(v[0], v[1]))))
    return rows


def _event_rows(result):
    u = result.config.units
    rows = []
    for i, tr in enumerate(result.trajectories):
        for e in sorted(tr.events, key=lambda e: e.t):
            rows.append((i, e.kind, e.t * u.time, e.x[0] * u.length, e.x[1] * u.length))
    return rows


def _overlay(result):
    """Initial one- and two-width contours of every packet, in output units."""
    cfg = result.config
    if cfg.model == "plane-wave":
        return []
    L = cfg.units.length
    out = []
    for p in cfg.build_model().packets:
        for k in (1.0, 2.0):
            out.append([p.center0[0] * L, p.center0[1] * L, k * p.sigma0[0] * L, k * p.sigma0[1] * L])
    return out


def emit_csv(result, out_dir):
    """Write trajectories, events, reports and a hashed manifest into ``out_dir``."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        traj_path, ev_path = out / "trajectories.csv", out / "events.csv"
        rep_path, man_path = out / "reports.jsonl", out / "manifest.json"
        with open(traj_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(TRAJECTORY_COLUMNS)
            for row in _trajectory_rows(result):
                w.writerow([row[0]] + [_fmt(v) for v in row[1:]])
        with open(ev_path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(EVENT_COLUMNS)
            for tid, kind, t, x, y in _event_rows(result):
                w.writerow([tid, kind, _fmt(t), _fmt(x), _fmt(y)])
        with open(rep_path, "w") as fh:
            for rep in result.reports:
                fh.write(json.dumps(_jsonable(rep), sort_keys=True) + "\n")
        files = {p.name: _sha256(p) for p in (traj_path, ev_path, rep_path)}
        manifest = {
            "tool": "bohmspin", "version": __version__,
            "scenario": result.config.name, "seed": result.config.seed,
            "provenance": result.provenance,
            "units": {"system": result.config.units.kind,
                      **{q: result.config.units.symbol(q) for q in ("length", "time", "speed")}},
            "config": _jsonable(asdict(result.config)),
            "groups": result.groups,
            "overlay": _overlay(result),
            "passed": result.passed,
            "files": files,
        }
        man_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write output to {out}: {exc.strerror or exc}") from exc
    return OutputBundle(out, traj_path, ev_path, rep_path, man_path)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if np.isfinite(f) else repr(f)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    return str(obj)


# -- SVG -------------------------------------------------------------------------

_PALETTE = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#2e4053")
_W, _H, _PAD = 640, 640, 60


def _nice_ticks(lo, hi, n=5):
    span = hi - lo
    raw = span / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=10 * mag)
    start = np.ceil(lo / step) * step
    return [float(v) for v in np.arange(start, hi + 0.5 * step, step) if v <= hi + 1e-12 * span]


def _tick_label(v):
    return f"{v:.4g}"


def _render(series, title, xlabel, ylabel, overlay=(), equal=True):
    """Self-contained SVG with one polyline per series entry ``(group, xs, ys)``."""
    xs = [x for _, sx, _ in series for x in sx] + [o[0] + s * o[2] for o in overlay for s in (-1, 1)]
    ys = [y for _, _, sy in series for y in sy] + [o[1] + s * o[3] for o in overlay for s in (-1, 1)]
    if xs:
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    else:
        x0, x1, y0, y1 = -1.0, 1.0, -1.0, 1.0
    if x1 - x0 <= 0:
        x0, x1 = x0 - 1.0, x1 + 1.0
    if y1 - y0 <= 0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    if equal and max(x1 - x0, y1 - y0) <= 10 * min(x1 - x0, y1 - y0):
        cx, cy, half = (x0 + x1) / 2, (y0 + y1) / 2, max(x1 - x0, y1 - y0) / 2
        x0, x1, y0, y1 = cx - half, cx + half, cy - half, cy + half
    margin_x, margin_y = 0.04 * (x1 - x0), 0.04 * (y1 - y0)
    x0, x1, y0, y1 = x0 - margin_x, x1 + margin_x, y0 - margin_y, y1 + margin_y
    inner_w, inner_h = _W - 2 * _PAD, _H - 2 * _PAD

    def px(x):
        return _PAD + (x - x0) / (x1 - x0) * inner_w

    def py(y):
        return _H - _PAD - (y - y0) / (y1 - y0) * inner_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="{_PAD / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{title}</text>',
        f'<rect x="{_PAD}" y="{_PAD}" width="{inner_w}" height="{inner_h}" fill="none" stroke="black"/>',
    ]
    for v in _nice_ticks(x0, x1):
        X = px(v)
        out.append(f'<line x1="{X:.2f}" y1="{_H - _PAD}" x2="{X:.2f}" y2="{_H - _PAD + 5}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{_H - _PAD + 18}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="11">{_tick_label(v)}</text>')
    for v in _nice_ticks(y0, y1):
        Y = py(v)
        out.append(f'<line x1="{_PAD - 5}" y1="{Y:.2f}" x2="{_PAD}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{_PAD - 8}" y="{Y + 4:.2f}" text-anchor="end" font-family="sans-serif" '
                   f'font-size="11">{_tick_label(v)}</text>')
    out.append(f'<text x="{_W / 2:.1f}" y="{_H - 15}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="13">{xlabel}</text>')
    out.append(f'<text x="15" y="{_H / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="13" '
               f'transform="rotate(-90 15 {_H / 2:.1f})">{ylabel}</text>')
    for cx, cy, rx, ry in overlay:
        out.append(f'<ellipse cx="{px(cx):.2f}" cy="{py(cy):.2f}" rx="{rx / (x1 - x0) * inner_w:.2f}" '
                   f'ry="{ry / (y1 - y0) * inner_h:.2f}" fill="none" stroke="#999999" stroke-dasharray="4 3"/>')
    for group, sx, sy in series:
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(sx, sy))
        colour = _PALETTE[group % len(_PALETTE)]
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1" points="{pts}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _plots_from_rows(scenario, rows, groups, units, overlay, group_speed):
    """Figure documents keyed by file name, from trajectory rows."""
    gid = {i: g for g, ids in enumerate(groups.values()) for i in ids}
    by_traj = {}
    for r in rows:
        by_traj.setdefault(int(r[0]), []).append(r)
    lsym, tsym, vsym = units["length"], units["time"], units["speed"]
    paths = [(gid.get(i, 0), [r[2] for r in rs], [r[3] for r in rs]) for i, rs in sorted(by_traj.items())]
    docs = {f"{scenario}.svg": _render(paths, scenario, f"x [{lsym}]", f"y [{lsym}]", overlay)}
    if group_speed:
        speed = []
        for i, rs in sorted(by_traj.items()):
            speed.append((gid.get(i, 0), [r[1] for r in rs],
                          [float(np.hypot(r[4] - group_speed, r[5])) / group_speed for r in rs]))
        docs[f"{scenario}-speed.svg"] = _render(speed, f"{scenario}: |v - u| / Vx", f"t [{tsym}]",
                                                "|v - u| / Vx", equal=False)
    return docs


def emit_svg(result, out_dir, style=None):
    """Write one SVG per figure analogue; returns the written paths.

    ``style={"contours": True}`` overlays the initial one- and two-width
    density contours.  Output bytes depend only on the result.
    """
    style = style or {}
    cfg = result.config
    rows = [tuple(float(v) if k else int(v) for k, v in enumerate(r)) for r in _trajectory_rows(result)]
    overlay = _overlay(result) if style.get("contours") else []
    units = {q: cfg.units.symbol(q) for q in ("length", "time", "speed")}
    docs = _plots_from_rows(cfg.name, rows, result.groups, units, overlay, _speed_plot_u(cfg))
    return _write_docs(docs, out_dir)


def _speed_plot_u(cfg):
    if "speed-ratio" in cfg.gates:
        return float(np.hypot(*cfg.velocity)) * cfg.units.speed
    return None


def _write_docs(docs, out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, text in docs.items():
        path = out / name
        path.write_text(text)
        paths.append(path)
    return paths


def plot_directory(result_dir, contours=False):
    """Re-render the SVG figures of an emitted bundle."""
    d = Path(result_dir)
    manifest = json.loads((d / "manifest.json").read_text())
    with open(d / "trajectories.csv", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRAJECTORY_COLUMNS:
            raise ConfigError(f"{d / 'trajectories.csv'}: unexpected columns {header}")
        rows = [(int(r[0]),) + tuple(float(v) for v in r[1:]) for r in reader]
    groups = {k: v for k, v in manifest["groups"].items()}
    cfg = manifest["config"]
    u = None
    if "speed-ratio" in cfg.get("gates", []):
        scale = 1.0 if manifest["units"]["system"] == "dimensionless" else \
            cfg["units"]["hbar_Js"] / (cfg["units"]["mass_kg"] * cfg["units"]["sigma0_m"])
        u = float(np.hypot(*cfg["velocity"])) * scale
    overlay = manifest["overlay"] if contours else []
    docs = _plots_from_rows(manifest["scenario"], rows, groups, manifest["units"], overlay, u)
    return _write_docs(docs, d)


# -- entry point ------------------------------------------------------------------

def _parser():
    p = argparse.ArgumentParser(prog="bohmspin", description="Spin-extended Bohmian trajectory experiments.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a preset or a config file")
    run.add_argument("preset", nargs="?", help="preset name (see list-presets)")
    run.add_argument("--config", help="config file path")
    run.add_argument("--out", default="out", help="output directory")
    run.add_argument("--seed", type=int, help="seed override")
    run.add_argument("--spin", choices=("on", "off"), help="guidance-mode override")
    run.add_argument("--svg", action="store_true", help="also write SVG figures")
    run.add_argument("--contours", action="store_true", help="overlay initial density contours in SVGs")
    run.add_argument("--si", action="store_true", help="use SI units (electron, sigma0 = 2e-8 m)")
    sub.add_parser("list-presets", help="list built-in presets")
    ver = sub.add_parser("verify", help="run the acceptance suite")
    ver.add_argument("--only", help="comma-separated criterion numbers")
    plot = sub.add_parser("plot", help="render SVGs for an emitted result directory")
    plot.add_argument("result_dir")
    plot.add_argument("--contours", action="store_true")
    return p


def _run(args, parser):
    if bool(args.preset) == bool(args.config):
        parser.error("run needs exactly one of PRESET or --config PATH")
    cfg = parse_config(args.config) if args.config else preset(args.preset)
    if args.si and not cfg.units.is_si:
        cfg = si_variant(cfg)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.spin is not None:
        cfg = cfg.with_spin(args.spin == "on")
    result = run_scenario(cfg)
    bundle = emit_csv(result, args.out)
    if args.svg:
        bundle.plots = emit_svg(result, args.out, {"contours": args.contours})
    for rep in result.reports:
        print(f"{'PASS' if rep['passed'] else 'FAIL'}  {rep['gate']}: {rep['value']:.6g}")
    print(f"wrote {bundle.directory}")
    return 0 if result.passed else 1


def main(argv=None):
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list-presets":
            for cfg in builtin_presets():
                print(f"{cfg.name:28s} {cfg.description}")
            return 0
        if args.command == "run":
            return _run(args, parser)
        if args.command == "plot":
            for path in plot_directory(args.result_dir, args.contours):
                print(path)
            return 0
        if args.command == "verify":
            from .acceptance import run_criteria

            only = None
            if args.only:
                only = [int(v) for v in args.only.split(",")]
            results = run_criteria(only, stream=sys.stdout)
            return 0 if all(r.passed for r in results) else 1
    except ConfigError as exc:
        print(f"bohmspin: error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except OSError as exc:
        print(f"bohmspin: error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
