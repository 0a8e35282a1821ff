"""Dimensionless parameter set for peristaltic flow in a porous channel.

Every solver in the package takes a single :class:`FlowParameters` record.
Dimensional inputs enter only through :func:`nondimensionalize`.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Iterable, Mapping

#: amplitude ratio above which the O(eps^2) truncation is flagged
EPS_WARN_THRESHOLD = 0.3

#: config-file / CLI key -> FlowParameters attribute
CONFIG_KEYS = {
    "R": "reynolds_R",
    "alpha": "wave_number_alpha",
    "e": "porosity_e",
    "k": "darcy_k",
    "s": "slip_s",
    "eps": "amplitude_ratio_eps",
    "dp2": "dp2_mean",
}


class ParameterError(ValueError):
    """Raised when one or more parameter invariants are violated.

    ``violations`` holds one human-readable message per failed invariant.
    """

    def __init__(self, violations: Iterable[str]):
        self.violations = list(violations)
        super().__init__("invalid parameters: " + "; ".join(self.violations))


class PerturbationValidityWarning(UserWarning):
    """Amplitude ratio large enough that the second-order series is suspect."""


@dataclass(frozen=True)
class DimensionalScales:
    wave_speed_c: float
    half_width_d: float
    kinematic_viscosity_nu: float
    amplitude_a: float
    wavelength_lambda: float
    permeability_k_dim: float

    def violations(self) -> list[str]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v > 0):
                out.append(f"{f.name} must be strictly positive and finite (got {v!r})")
        a, d = self.amplitude_a, self.half_width_d
        if a > 0 and d > 0 and not a < d:
            out.append(f"amplitude_a must be smaller than half_width_d (a={a!r}, d={d!r})")
        return out


@dataclass(frozen=True)
class FlowParameters:
    """Dimensionless group (R, alpha, e, k, s, eps) plus mean pressure gradient.

    ``darcy_k`` may be ``math.inf`` to select the Darcy-free (clear fluid)
    limit evaluated analytically. ``dp2_mean`` is the time-averaged
    second-order pressure gradient; it is only a default, every operation
    that needs it also accepts it explicitly.
    """

    reynolds_R: float
    wave_number_alpha: float
    porosity_e: float = 1.0
    darcy_k: float = math.inf
    slip_s: float = 0.0
    amplitude_ratio_eps: float = 0.1
    dp2_mean: float = 0.0

    # short aliases used throughout the numerics
    @property
    def R(self) -> float:
        return self.reynolds_R

    @property
    def alpha(self) -> float:
        return self.wave_number_alpha

    @property
    def e(self) -> float:
        return self.porosity_e

    @property
    def k(self) -> float:
        return self.darcy_k

    @property
    def s(self) -> float:
        return self.slip_s

    @property
    def eps(self) -> float:
        return self.amplitude_ratio_eps

    @property
    def e_over_k(self) -> float:
        return self.porosity_e / self.darcy_k

    def with_values(self, **short) -> "FlowParameters":
        """Copy with fields replaced, accepting the short config keys."""
        return replace(self, **{CONFIG_KEYS.get(k, k): float(v) for k, v in short.items()})

    def as_config(self) -> dict[str, float]:
        return {key: getattr(self, attr) for key, attr in CONFIG_KEYS.items()}

    def violations(self) -> list[str]:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if math.isnan(v):
                out.append(f"{f.name} is NaN")
        R, a, e, k, s, eps = (self.reynolds_R, self.wave_number_alpha, self.porosity_e,
                              self.darcy_k, self.slip_s, self.amplitude_ratio_eps)
        if not (R > 0 and math.isfinite(R)):
            out.append(f"reynolds_R must be positive and finite (got {R!r})")
        if not (a > 0 and math.isfinite(a)):
            out.append(f"wave_number_alpha must be positive and finite (got {a!r})")
        if not (0 < e <= 1):
            out.append(f"porosity_e must lie in (0, 1] (got {e!r})")
        if not k > 0:
            out.append(f"darcy_k must be positive (got {k!r})")
        if not (s >= 0 and math.isfinite(s)):
            out.append(f"slip_s must be non-negative and finite (got {s!r})")
        if not (0 <= eps < 1):
            out.append(f"amplitude_ratio_eps must lie in [0, 1) (got {eps!r})")
        if not math.isfinite(self.dp2_mean):
            out.append(f"dp2_mean must be finite (got {self.dp2_mean!r})")
        return out


def validate(params: FlowParameters) -> FlowParameters:
    """Return ``params`` unchanged or raise one aggregated :class:`ParameterError`.

    An amplitude ratio above ``EPS_WARN_THRESHOLD`` is accepted with a
    :class:`PerturbationValidityWarning`.
    """
    problems = params.violations()
    if problems:
        raise ParameterError(problems)
    if params.amplitude_ratio_eps > EPS_WARN_THRESHOLD:
        warnings.warn(
            f"amplitude ratio eps={params.amplitude_ratio_eps} exceeds {EPS_WARN_THRESHOLD}; "
            "the O(eps^2) truncation may be inaccurate",
            PerturbationValidityWarning,
            stacklevel=2,
        )
    return params


def nondimensionalize(scales: DimensionalScales, porosity_e: float, slip_s: float,
                      dp2_mean: float = 0.0) -> FlowParameters:
    """Build the dimensionless group from dimensional scales.

    R = c d / nu, alpha = 2 pi d / lambda, k = k_dim / d^2, eps = a / d.
    Porosity and slip are already dimensionless and pass through.
    """
    problems = scales.violations()
    if problems:
        raise ParameterError(problems)
    d = scales.half_width_d
    params = FlowParameters(
        reynolds_R=scales.wave_speed_c * d / scales.kinematic_viscosity_nu,
        wave_number_alpha=2.0 * math.pi * d / scales.wavelength_lambda,
        porosity_e=porosity_e,
        darcy_k=scales.permeability_k_dim / (d * d),
        slip_s=slip_s,
        amplitude_ratio_eps=scales.amplitude_a / d,
        dp2_mean=dp2_mean,
    )
    return validate(params)


def parse_config_text(text: str) -> dict[str, float]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError([f"line {lineno}: expected 'key = value', got {raw.strip()!r}"])
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ParameterError([f"line {lineno}: unknown key {key!r} "
                                  f"(known: {', '.join(CONFIG_KEYS)})"])
        try:
            out[key] = float(value)
        except ValueError:
            raise ParameterError([f"line {lineno}: {key} is not a number: {value!r}"]) from None
    return out


def load_config(path: str | Path) -> dict[str, float]:
    return parse_config_text(Path(path).read_text())


def format_config(values: Mapping[str, float], header: str | None = None) -> str:
    lines = [f"# {line}" for line in (header or "").splitlines()]
    lines += [f"{key} = {float(values[key])!r}" for key in CONFIG_KEYS if key in values]
    return "\n".join(lines) + "\n"


def params_from_mapping(values: Mapping[str, float],
                        base: FlowParameters | None = None) -> FlowParameters:
    """Overlay short-key ``values`` on ``base`` (or the package defaults)."""
    if base is None:
        missing = [key for key in ("R", "alpha") if key not in values]
        if missing:
            raise ParameterError([f"missing required parameter {key}" for key in missing])
        base = FlowParameters(reynolds_R=float(values["R"]),
                              wave_number_alpha=float(values["alpha"]))
    unknown = set(values) - set(CONFIG_KEYS)
    if unknown:
        raise ParameterError([f"unknown parameter {key!r}" for key in sorted(unknown)])
    return validate(base.with_values(**values))


def params_dict(params: FlowParameters) -> dict[str, float]:
    return asdict(params)
