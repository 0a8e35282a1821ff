import math

import numpy as np
import pytest

from peristaltic import core, sweep
from peristaltic.params import FlowParameters

BASE = FlowParameters(10.0, 0.25, 0.9, 1000.0, 0.00001)


def test_fig3_preset():
    preset = sweep.figure_preset("fig3")
    ours, clear = preset.specs
    assert ours.base == FlowParameters(1.0, 0.4, 0.99, 10000.0, 0.00001)
    assert ours.quantity == clear.quantity == "F"
    assert clear.base.k == math.inf and clear.base.e == 1.0 and clear.base.s == 0.0
    assert not preset.approximate


def test_fig9_preset():
    (spec,) = sweep.figure_preset("fig9").specs
    b = spec.base
    assert (b.alpha, b.e, b.eps, b.dp2_mean, b.k, b.s) == (0.25, 0.9, 0.1, -2.5, 1000.0, 0.0001)
    assert spec.axis == "R" and spec.quantity == "mean_velocity"


def test_fig19_preset():
    (spec,) = sweep.figure_preset("fig19").specs
    b = spec.base
    assert (b.R, b.alpha, b.k, b.s) == (20.0, 0.2, 10.0, 0.001)
    assert spec.axis == "e" and spec.quantity == "critical_pressure"


def test_fig13a_is_e_sweep_at_unit_permeability():
    (spec,) = sweep.figure_preset("fig13a").specs
    assert spec.axis == "e" and spec.base.k == 1.0


def test_legend_values_are_flagged():
    for fid in ("fig4", "fig9", "fig10", "fig12"):
        preset = sweep.figure_preset(fid)
        assert preset.approximate and preset.notes


@pytest.mark.parametrize("fid", sweep.preset_ids())
def test_preset_json_round_trip(fid, tmp_path):
    preset = sweep.figure_preset(fid)
    again = sweep.FigurePreset.loads(preset.dumps())
    assert again == preset
    path = sweep.export_preset(preset, tmp_path)
    assert sweep.load_preset(path) == preset


def test_unknown_preset_lists_ids():
    with pytest.raises(sweep.UnknownPresetError, match="fig3.*fig20d"):
        sweep.figure_preset("fig99")


def test_single_value_sweep_equals_direct_call():
    spec = sweep.SweepSpec(BASE, "R", (5.0,), "F", y_samples=11)
    (prof,) = sweep.run_sweep(spec).profiles
    direct = core.F_of_y(BASE.with_values(R=5.0), None, np.linspace(-1, 1, 11))
    np.testing.assert_array_equal(prof.values, direct)
    assert prof.label == "R=5"
    series = sweep.run_sweep(sweep.SweepSpec(BASE, "k", (10.0,), "critical_pressure")).series
    assert series == [(10.0, core.critical_reflux_pressure(BASE.with_values(k=10.0)))]


def test_order_kept_with_threads():
    spec = sweep.SweepSpec.spaced(BASE, "R", 1, 40, 30, "D")
    serial = sweep.run_sweep(spec, workers=1).series
    assert sweep.run_sweep(spec, workers=8).series == serial
    assert [v for v, _ in serial] == list(spec.values)


def test_log_spacing():
    spec = sweep.SweepSpec.spaced(BASE, "k", 0.01, 1000, 6, "D", "log")
    assert spec.values == pytest.approx((0.01, 0.1, 1, 10, 100, 1000))
    with pytest.raises(ValueError):
        sweep.SweepSpec.spaced(BASE, "k", 1, 2, 3, "D", "cubic")


def test_invalid_points_recorded():
    spec = sweep.SweepSpec(BASE, "e", (0.5, 0.0, 1.5, 0.9), "critical_pressure")
    result = sweep.run_sweep(spec)
    assert [v for v, _ in result.series] == [0.5, 0.9]
    assert [v for v, _ in result.failures] == [0.0, 1.5]
    assert "porosity_e" in result.failures[0][1]


def test_every_point_invalid():
    with pytest.raises(sweep.SweepError, match="every sweep point failed"):
        sweep.run_sweep(sweep.SweepSpec(BASE, "alpha", (-1.0, 0.0), "D"))


@pytest.mark.parametrize("kwargs", [
    dict(axis="Re", values=(1.0,), quantity="D"),
    dict(axis="R", values=(), quantity="D"),
    dict(axis=None, values=(1.0,), quantity="D"),
    dict(axis="R", values=(1.0,), quantity="velocity"),
])
def test_malformed_spec(kwargs):
    with pytest.raises(ValueError):
        sweep.SweepSpec(BASE, **kwargs)


def test_spec_dict_round_trip():
    spec = sweep.SweepSpec(BASE.with_values(dp2=-1.0), "s", (0.0, 0.01), "mean_velocity", 51,
                           "slip")
    assert sweep.SweepSpec.from_dict(spec.to_dict()) == spec


def test_fig16a_strictly_decreasing():
    (result,) = sweep.run_preset(sweep.figure_preset("fig16a"))
    assert not result.failures
    assert sweep.is_strictly_monotone([v for _, v in result.series], increasing=False)


def test_all_presets_run():
    for fid in sweep.preset_ids():
        for result in sweep.run_preset(sweep.figure_preset(fid)):
            assert not result.failures, (fid, result.failures)
