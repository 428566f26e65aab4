"""Config grammar, emitted bundles and the command-line entry point."""

import csv
import hashlib
import json

import numpy as np
import pytest

from bohmspin.cli import emit_csv, emit_svg, main, parse_config, plot_directory
from bohmspin.errors import ParseError, ValidationError
from bohmspin.scenarios import ScenarioResult, preset, run_scenario


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_minimal_config(tmp_path):
    cfg = parse_config(write(tmp_path, "scenario = fig2-catherine-wheel\n"))
    assert cfg == preset("fig2-catherine-wheel")


def test_two_slit_section(tmp_path):
    cfg = parse_config(write(tmp_path, "scenario = fig7-two-slit-spin\n[two-slit]\nseparation = 20\n"))
    assert cfg.separation == 20.0
    cfg = parse_config(write(tmp_path, "scenario = fig7-two-slit-spin  # comment\nseed = 4\n"
                                       "[two-slit]\nseparation = 12\ngroup_speed = 50\n"
                                       "[integrator]\nt1 = 6\n[guidance]\nspin = off\n"))
    assert (cfg.separation, cfg.velocity, cfg.t_span, cfg.spin_term, cfg.seed) == \
        (12.0, (50.0, 0.0), (0.0, 6.0), False, 4)


def test_si_config_converts_once(tmp_path):
    text = ("scenario = fig7-two-slit-spin\nunits = SI\n[units]\nsigma0_m = 2e-8\n"
            "mass_kg = 9.1093837015e-31\nhbar_js = 1.054571817e-34\n[two-slit]\nseparation = 4e-7\n")
    cfg = parse_config(write(tmp_path, text))
    assert cfg.separation == pytest.approx(20.0)
    assert cfg.units.is_si
    with pytest.raises(ValidationError) as exc:
        parse_config(write(tmp_path, "units = SI\n[units]\nsigma0_m = 2e-8\n"))
    assert "mass_kg" in str(exc.value)


@pytest.mark.parametrize("text,key", [
    ("[two-slit]\nseparation = -1\n", "separation"),
    ("colour = blue\n", "colour"),
    ("[integrator]\nwarp = 9\n", "integrator.warp"),
    ("[nowhere]\nx = 1\n", "[nowhere]"),
    ("[integrator]\nt1 = soon\n", "integrator.t1"),
])
def test_validation_errors(tmp_path, text, key):
    with pytest.raises(ValidationError) as exc:
        parse_config(write(tmp_path, text))
    assert exc.value.key == key


def test_parse_error_reports_line(tmp_path):
    with pytest.raises(ParseError) as exc:
        parse_config(write(tmp_path, "scenario = fig2-catherine-wheel\n# note\nthis line is wrong\n"))
    assert exc.value.lineno == 3 and "line 3" in str(exc.value)
    with pytest.raises(ParseError) as exc:
        parse_config(write(tmp_path, "seed = 1\nseed = 2\n"))
    assert exc.value.lineno == 2


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_fig2_bundle(tmp_path):
    res = run_scenario(preset("fig2-catherine-wheel"))
    b = emit_csv(res, tmp_path)
    rows = read_csv(b.trajectories)
    assert tuple(rows[0]) == ("traj_id", "t", "x", "y", "vx", "vy", "speed")
    assert len(rows) - 1 == 16 * 101
    keys = [(int(r[0]), float(r[1])) for r in rows[1:]]
    assert keys == sorted(keys)
    assert tuple(read_csv(b.events)[0]) == ("traj_id", "kind", "t", "x", "y")
    manifest = json.loads(b.manifest.read_text())
    for name, digest in manifest["files"].items():
        assert hashlib.sha256((tmp_path / name).read_bytes()).hexdigest() == digest
    reports = [json.loads(line) for line in b.reports.read_text().splitlines()]
    assert [r["gate"] for r in reports] == list(preset("fig2-catherine-wheel").gates)


def test_csv_round_trip_is_bit_exact(tmp_path):
    res = run_scenario(preset("fig5-superposition"))
    b = emit_csv(res, tmp_path)
    rows = read_csv(b.trajectories)[1:]
    x = np.array([[float(r[2]), float(r[3])] for r in rows])
    expected = np.concatenate([tr.x for tr in res.trajectories])
    assert np.array_equal(x, expected)


def test_spin_preset_emits_axis_crossings(tmp_path):
    b = emit_csv(run_scenario(preset("fig7-two-slit-spin")), tmp_path)
    assert any(r[1] == "axis-crossing" for r in read_csv(b.events)[1:])


def empty_result():
    cfg = preset("fig2-catherine-wheel")
    return ScenarioResult(cfg, [], {}, [], {"config_hash": cfg.digest(), "seed": 0, "version": "x"})


def test_empty_result_outputs(tmp_path):
    b = emit_csv(empty_result(), tmp_path)
    assert len(read_csv(b.trajectories)) == 1 and len(read_csv(b.events)) == 1
    (svg,) = emit_svg(empty_result(), tmp_path)
    text = svg.read_text()
    assert "<polyline" not in text and "<line" in text


def test_svg_is_deterministic_and_replottable(tmp_path):
    res = run_scenario(preset("fig2-catherine-wheel"))
    (a,) = emit_svg(res, tmp_path / "a", {"contours": True})
    (b,) = emit_svg(run_scenario(preset("fig2-catherine-wheel")), tmp_path / "b", {"contours": True})
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().count("<polyline") == 16 and "<ellipse" in a.read_text()
    emit_csv(res, tmp_path / "a")
    before = a.read_bytes()
    plot_directory(tmp_path / "a", contours=True)
    assert a.read_bytes() == before


def test_speed_figure_for_fig8(tmp_path):
    paths = emit_svg(run_scenario(preset("fig8-speed-ratio")), tmp_path)
    assert sorted(p.name for p in paths) == ["fig8-speed-ratio-speed.svg", "fig8-speed-ratio.svg"]


def test_main_run_and_seed_determinism(tmp_path, capsys):
    assert main(["run", "fig2-catherine-wheel", "--out", str(tmp_path / "a"), "--seed", "3", "--svg"]) == 0
    assert main(["run", "fig2-catherine-wheel", "--out", str(tmp_path / "b"), "--seed", "3", "--svg"]) == 0
    for name in ("trajectories.csv", "events.csv", "reports.jsonl", "manifest.json",
                 "fig2-catherine-wheel.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_main_spin_override(tmp_path, capsys):
    assert main(["run", "fig7-two-slit-spin", "--spin", "off", "--out", str(tmp_path)]) == 0
    assert len(read_csv(tmp_path / "events.csv")) == 1
    assert "crossing-dichotomy: 0" in capsys.readouterr().out


def test_main_config_and_errors(tmp_path, capsys):
    cfg = write(tmp_path, "scenario = fig2-catherine-wheel\n")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    bad = write(tmp_path, "[two-slit]\nseparation = -1\n", "bad.cfg")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
    assert "separation" in capsys.readouterr().err
    assert main(["run", "no-such-preset"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    assert main(["list-presets"]) == 0
    assert capsys.readouterr().out.count("\n") == 7


def test_main_gate_failure_exit_code(tmp_path, monkeypatch):
    import bohmspin.cli as cli

    real = cli.run_scenario

    def failing(cfg):
        res = real(cfg)
        res.reports[0]["passed"] = False
        return res

    monkeypatch.setattr(cli, "run_scenario", failing)
    assert main(["run", "fig2-catherine-wheel", "--out", str(tmp_path)]) == 1


def test_main_si_plot(tmp_path):
    assert main(["run", "fig2-catherine-wheel", "--si", "--out", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["units"]["length"] == "m"
    row = read_csv(tmp_path / "trajectories.csv")[1]
    assert abs(float(row[2])) < 1e-6
    assert main(["plot", str(tmp_path)]) == 0
    assert "[m]" in (tmp_path / "fig2-catherine-wheel.svg").read_text()
