"""Preset definitions, unit conversion and the scenario runner."""

from dataclasses import replace

import numpy as np
import pytest

from bohmspin.errors import ValidationError
from bohmspin.scenarios import (UnitSystem, builtin_presets, preset, run_scenario, si_variant)

NAMES = ["fig2-catherine-wheel", "fig3-boosted", "fig4-asymmetric-product", "fig5-superposition",
         "fig6-two-slit-nospin", "fig7-two-slit-spin", "fig8-speed-ratio"]


def test_preset_catalogue():
    presets = builtin_presets()
    assert [p.name for p in presets] == NAMES
    assert preset("fig7-two-slit-spin").separation == 20.0
    sx, sy = preset("fig4-asymmetric-product").sigma0
    assert sx == 2 * sy
    slit = preset("fig6-two-slit-nospin")
    assert slit.ensemble.rings.radii == pytest.approx((0.4, 0.8, 1.2, 1.6, 2.0, 2.4))
    assert slit.ensemble.rings.reference_count == 20
    assert slit.velocity[0] == pytest.approx(200 * slit.constants.characteristic_speed(1.0))
    with pytest.raises(ValidationError):
        preset("fig9")


@pytest.mark.parametrize("name", NAMES)
def test_every_preset_passes_its_gates(name):
    result = run_scenario(preset(name))
    assert result.reports, "each preset carries gates"
    assert result.passed, result.reports


def test_fig3_families():
    res = run_scenario(preset("fig3-boosted"))
    assert sorted(res.groups) == sorted(["main", "u=0.4", "u=1.0", "u=2.5"])
    assert all(len(v) == 16 for v in res.groups.values())


def test_fig5_chirality_only_with_spin():
    rep = run_scenario(preset("fig5-superposition")).reports[0]
    assert rep["spin_off"] < 1e-8 and rep["value"] > 1e-3


def test_determinism_and_provenance():
    cfg = replace(preset("fig5-superposition"), seed=9)
    a, b = run_scenario(cfg), run_scenario(cfg)
    assert a.provenance == b.provenance and a.provenance["seed"] == 9
    for ta, tb in zip(a.trajectories, b.trajectories):
        assert np.array_equal(ta.x, tb.x) and np.array_equal(ta.v, tb.v)
    assert a.provenance["config_hash"] != run_scenario(replace(cfg, seed=10)).provenance["config_hash"]


def test_validation_names_field():
    base = preset("fig2-catherine-wheel")
    for field, change in (("separation", {"model": "superposition", "separation": -1.0}),
                          ("sigma0", {"sigma0": (0.0, 1.0)}),
                          ("t1", {"t_span": (2.0, 1.0)}),
                          ("spin_sign", {"spin_sign": 2}),
                          ("gates", {"gates": ("bogus",)})):
        with pytest.raises(ValidationError) as exc:
            replace(base, **change)
        assert exc.value.key == field


def test_si_units():
    u = UnitSystem.electron()
    assert u.length == 2e-8
    assert u.speed == pytest.approx(1.054571817e-34 / (9.1093837015e-31 * 2e-8))
    assert u.time == pytest.approx(u.length / u.speed)
    si = si_variant(preset("fig7-two-slit-spin"))
    assert si.velocity[0] * u.speed == pytest.approx(1e8)
    assert si.c_ratio == pytest.approx(299_792_458.0 / u.speed)
    with pytest.raises(ValidationError):
        UnitSystem("SI", 2e-8, None, 1e-34)


def test_spin_toggle_matches_nospin_preset():
    a = run_scenario(preset("fig7-two-slit-spin").with_spin(False))
    b = run_scenario(preset("fig6-two-slit-nospin"))
    assert sum(len(t.crossings()) for t in a.trajectories) == 0
    for ta, tb in zip(a.trajectories, b.trajectories):
        assert np.array_equal(ta.x, tb.x)
