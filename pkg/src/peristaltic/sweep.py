"""Declarative one-parameter sweeps and the published figure scenarios."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import core
from .params import CONFIG_KEYS, FlowParameters, ParameterError, validate

PROFILE_QUANTITIES = tuple(q.value for q in core.Quantity)
SCALAR_QUANTITIES = ("D", "critical_pressure")
AXES = tuple(CONFIG_KEYS)


class SweepError(RuntimeError):
    pass


class UnknownPresetError(KeyError):
    def __str__(self):
        return str(self.args[0])


@dataclass(frozen=True)
class SweepSpec:
    """One curve family: ``quantity`` evaluated as ``axis`` runs over ``values``.

    ``axis=None`` evaluates the base parameters once. Profile quantities yield
    one curve per value; scalar quantities yield a single (value, result) series.
    """

    base: FlowParameters
    axis: str | None
    values: tuple[float, ...]
    quantity: str
    y_samples: int = 201
    label: str = ""

    def __post_init__(self):
        if self.quantity not in PROFILE_QUANTITIES + SCALAR_QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")
        if self.axis is None:
            if self.values:
                raise ValueError("values given without an axis")
        elif self.axis not in AXES:
            raise ValueError(f"unknown axis {self.axis!r} (expected one of {', '.join(AXES)})")
        elif not self.values:
            raise ValueError("sweep needs at least one value")
        if self.y_samples < 2:
            raise ValueError("y_samples must be at least 2")

    @classmethod
    def spaced(cls, base: FlowParameters, axis: str, lo: float, hi: float, count: int,
               quantity: str, spacing: str = "linear", **kw) -> "SweepSpec":
        if spacing == "linear":
            values = np.linspace(lo, hi, count)
        elif spacing == "log":
            values = np.geomspace(lo, hi, count)
        else:
            raise ValueError(f"spacing must be 'linear' or 'log' (got {spacing!r})")
        return cls(base, axis, tuple(float(v) for v in values), quantity, **kw)

    @property
    def is_profile(self) -> bool:
        return self.quantity in PROFILE_QUANTITIES

    def points(self) -> list[FlowParameters]:
        if self.axis is None:
            return [self.base]
        return [self.base.with_values(**{self.axis: v}) for v in self.values]

    def to_dict(self) -> dict:
        return {"base": self.base.as_config(), "axis": self.axis, "values": list(self.values),
                "quantity": self.quantity, "y_samples": self.y_samples, "label": self.label}

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        base = FlowParameters(**{CONFIG_KEYS[k]: float(v) for k, v in data["base"].items()})
        return cls(base, data.get("axis"), tuple(float(v) for v in data.get("values", ())),
                   data["quantity"], int(data.get("y_samples", 201)), data.get("label", ""))


@dataclass
class SweepResult:
    spec: SweepSpec
    profiles: list[core.Profile] = field(default_factory=list)
    series: list[tuple[float, float]] = field(default_factory=list)
    failures: list[tuple[float | None, str]] = field(default_factory=list)


def _axis_value(spec: SweepSpec, index: int) -> float | None:
    return None if spec.axis is None else spec.values[index]


def _curve_label(spec: SweepSpec, value: float | None) -> str:
    if spec.axis is None:
        return spec.label or "base"
    return f"{spec.axis}={value:g}"


def _evaluate(spec: SweepSpec, index: int, params: FlowParameters):
    validate(params)
    value = _axis_value(spec, index)
    if spec.is_profile:
        return core.sample_profile(params, spec.quantity, spec.y_samples,
                                   label=_curve_label(spec, value))
    if spec.quantity == "D":
        return core.compute_D(params)
    return core.critical_reflux_pressure(params)


def run_sweep(spec: SweepSpec, workers: int | None = None) -> SweepResult:
    """Evaluate every point; failed points are recorded, not raised.

    Points run concurrently; results keep the input order.
    """
    points = spec.points()

    def job(item):
        index, params = item
        try:
            return index, _evaluate(spec, index, params), None
        except (ParameterError, ArithmeticError, ValueError) as exc:
            return index, None, str(exc)

    if workers == 1 or len(points) == 1:
        outcomes = list(map(job, enumerate(points)))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(job, enumerate(points)))

    result = SweepResult(spec)
    for index, value, error in outcomes:
        axis_value = _axis_value(spec, index)
        if error is not None:
            result.failures.append((axis_value, error))
        elif spec.is_profile:
            result.profiles.append(value)
        else:
            result.series.append((axis_value, float(value)))
    if not (result.profiles or result.series):
        details = "; ".join(f"{v}: {msg}" for v, msg in result.failures)
        raise SweepError(f"every sweep point failed ({details})")
    return result


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FigurePreset:
    """A published figure scenario.

    Fixed parameters come from the caption. Where the caption gives no
    plotted values (legend entries, axis ranges), the stored ones are best
    guesses and ``approximate`` is set.
    """

    id: str
    caption: str
    specs: tuple[SweepSpec, ...]
    approximate: bool = False
    notes: str = ""

    def to_dict(self) -> dict:
        return {"id": self.id, "caption": self.caption, "approximate": self.approximate,
                "notes": self.notes, "specs": [s.to_dict() for s in self.specs]}

    @classmethod
    def from_dict(cls, data: dict) -> "FigurePreset":
        return cls(data["id"], data.get("caption", ""),
                   tuple(SweepSpec.from_dict(s) for s in data["specs"]),
                   bool(data.get("approximate", False)), data.get("notes", ""))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text: str) -> "FigurePreset":
        return cls.from_dict(json.loads(text))


def _p(**short) -> FlowParameters:
    base = FlowParameters(reynolds_R=short.pop("R"), wave_number_alpha=short.pop("alpha"))
    return base.with_values(**short)


def _lin(lo, hi, count):
    return tuple(float(v) for v in np.linspace(lo, hi, count))


def _log(lo, hi, count):
    return tuple(float(v) for v in np.geomspace(lo, hi, count))


_LEGEND_NOTE = "legend values are not given in the caption; plotted values are estimates"
_RANGE_NOTE = "axis range is not given in the caption; the sampled range is an estimate"


def _build_presets() -> dict[str, FigurePreset]:
    presets: list[FigurePreset] = []
    add = presets.append

    d_base = _p(R=10, alpha=0.25, e=0.9, k=1000, s=0.00001)
    d_axes = {
        "fig2a": ("R", _lin(0.5, 30, 60)),
        "fig2b": ("alpha", _lin(0.05, 0.6, 56)),
        "fig2c": ("k", _log(0.1, 10000, 51)),
        "fig2d": ("e", _lin(0.3, 1.0, 36)),
        "fig2e": ("s", _lin(0.0, 0.1, 51)),
    }
    for fid, (axis, values) in d_axes.items():
        add(FigurePreset(fid, f"Variation of D with {axis}",
                         (SweepSpec(d_base, axis, values, "D", label=f"D_vs_{axis}"),),
                         approximate=True,
                         notes="the caption fixes no parameters; base values borrowed from "
                               "the F(y) figures"))

    ours = _p(R=1, alpha=0.4, k=10000, e=0.99, s=0.00001)
    add(FigurePreset(
        "fig3", "F(y): present model vs the classical clear-channel solution; "
                "R=1, alpha=0.4, k=10000, e=0.99, s=0.00001",
        (SweepSpec(ours, None, (), "F", label="this_work"),
         SweepSpec(core.darcy_free_limit(ours), None, (), "F", label="clear_channel")),
    ))

    f_figs = {
        "fig4": ("R", (1.0, 5.0, 10.0), dict(alpha=0.25, k=1000, e=0.9, s=0.00001, R=10)),
        "fig5": ("alpha", (0.1, 0.25, 0.4), dict(R=10, k=1000, e=0.9, s=0.00001, alpha=0.25)),
        "fig6": ("k", (10.0, 100.0, 1000.0), dict(R=10, alpha=0.25, e=0.9, s=0.00001, k=1000)),
        "fig7": ("e", (0.5, 0.7, 0.9), dict(R=10, alpha=0.25, k=1000, s=0.00001, e=0.9)),
        "fig8": ("s", (0.00001, 0.001, 0.01), dict(R=10, alpha=0.25, e=0.9, k=1000, s=0.00001)),
    }
    for fid, (axis, values, fixed) in f_figs.items():
        caption = f"F(y) for different {axis}; " + ", ".join(
            f"{k}={v:g}" for k, v in fixed.items() if k != axis)
        add(FigurePreset(fid, caption, (SweepSpec(_p(**fixed), axis, values, "F"),),
                         approximate=True, notes=_LEGEND_NOTE))

    u_common = dict(R=15, alpha=0.25, e=0.9, eps=0.1, dp2=-2.5, k=1000, s=0.0001)
    u_figs = {
        "fig9": ("R", (5.0, 10.0, 15.0, 20.0, 25.0, 30.0), {}),
        "fig10": ("dp2", (-2.5, -1.0, 0.0, 0.220966, 0.5), {}),
        "fig11": ("eps", (0.05, 0.1, 0.15, 0.2), {}),
        "fig12": ("k", (0.1, 1.0, 10.0, 100.0, 1000.0), {}),
        "fig13a": ("e", (0.3, 0.5, 0.7, 0.9), dict(k=1)),
        "fig13b": ("e", (0.3, 0.5, 0.7, 0.9), dict(k=0.5)),
        "fig13c": ("e", (0.3, 0.5, 0.7, 0.9), dict(k=0.1)),
        "fig13d": ("e", (0.3, 0.5, 0.7, 0.9), dict(k=0.05)),
        "fig14a": ("s", (0.0, 0.001, 0.01, 0.1), dict(e=0.7, k=1)),
        "fig14b": ("s", (0.0, 0.001, 0.01, 0.1), dict(e=0.7, k=0.05)),
        "fig15": ("alpha", (0.1, 0.2, 0.3, 0.4, 0.5), dict(e=0.7, k=100, s=0.001)),
    }
    for fid, (axis, values, override) in u_figs.items():
        fixed = {**u_common, **override}
        caption = f"time-averaged axial velocity for different {axis}; " + ", ".join(
            f"{k}={v:g}" for k, v in fixed.items() if k != axis)
        add(FigurePreset(fid, caption, (SweepSpec(_p(**fixed), axis, values, "mean_velocity"),),
                         approximate=True, notes=_LEGEND_NOTE))

    crit = []
    for suffix, e in (("a", 0.99), ("b", 0.9)):
        crit.append((f"fig16{suffix}", dict(alpha=0.2, k=1000, s=0.0001, e=e, R=10),
                     "R", _lin(1.0, 40.0, 79)))
        crit.append((f"fig17{suffix}", dict(R=20, k=1000, s=0.0001, e=e, alpha=0.2),
                     "alpha", _lin(0.05, 0.6, 56)))
    for suffix, e in (("a", 0.8), ("b", 0.7)):
        crit.append((f"fig18{suffix}", dict(R=20, alpha=0.2, s=0.0001, e=e, k=10),
                     "k", _log(0.01, 1000.0, 51)))
    crit.append(("fig19", dict(R=20, alpha=0.2, k=10, s=0.001, e=0.7), "e", _lin(0.1, 1.0, 46)))
    for suffix, (R, k) in zip("abcd", ((10, 10), (15, 10), (15, 1), (15, 0.1))):
        crit.append((f"fig20{suffix}", dict(e=0.7, alpha=0.2, R=R, k=k, s=0.001),
                     "s", _lin(0.0, 0.1, 51)))
    for fid, fixed, axis, values in crit:
        caption = f"critical reflux pressure vs {axis}; " + ", ".join(
            f"{k}={v:g}" for k, v in fixed.items() if k != axis)
        add(FigurePreset(fid, caption,
                         (SweepSpec(_p(**fixed), axis, values, "critical_pressure",
                                    label=f"critical_pressure_vs_{axis}"),),
                         approximate=True, notes=_RANGE_NOTE))

    presets.sort(key=lambda p: _preset_order(p.id))
    return {p.id: p for p in presets}


def _preset_order(fid: str):
    digits = "".join(ch for ch in fid[3:] if ch.isdigit())
    return int(digits), fid


PRESETS = _build_presets()


def preset_ids() -> list[str]:
    return list(PRESETS)


def figure_preset(fid: str) -> FigurePreset:
    try:
        return PRESETS[fid]
    except KeyError:
        raise UnknownPresetError(
            f"unknown figure id {fid!r}; available: {', '.join(PRESETS)}") from None


def load_preset(path: str | Path) -> FigurePreset:
    return FigurePreset.loads(Path(path).read_text())


def export_preset(preset: FigurePreset, directory: str | Path) -> Path:
    path = Path(directory) / f"{preset.id}.json"
    path.write_text(preset.dumps())
    return path


def run_preset(preset: FigurePreset, workers: int | None = None) -> list[SweepResult]:
    return [run_sweep(spec, workers) for spec in preset.specs]


def is_strictly_monotone(values: Sequence[float], increasing: bool) -> bool:
    d = np.diff(np.asarray(values, dtype=float))
    return bool(np.all(d > 0) if increasing else np.all(d < 0))
