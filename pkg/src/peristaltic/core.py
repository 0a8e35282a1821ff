"""Closed-form second-order perturbation solution for peristaltic pumping.

The channel walls ``y = +-(1 + eps cos alpha(x - t))`` drive an initially
stagnant fluid (no imposed zeroth-order pressure gradient). The first-order
stream function is ``Re[phi1(y) exp(i alpha (x - t))]`` with

    phi1(y) = C11 sinh(alpha y) + C12 sinh(beta y),
    beta^2  = alpha^2 + e/k - i alpha e R,

and the time-averaged axial velocity is ``u_mean = eps^2/2 * phi20'(y)``,
where ``phi20'`` solves a forced second-order ODE with a Saffman-slip wall
condition. Every derivative below is taken analytically so that residual
checks measure algebra, not discretisation.

All evaluators accept scalar or array ``y`` and return the same shape.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .hyperbolic import (
    cosh_ratio,
    pressure_gap,
    pressure_shape,
    wall_factor,
)
from .params import FlowParameters, validate

#: |den| / scale below which the first-order system is treated as singular
RESONANCE_TOL = 1e-12
#: |w^2 - e/k| / scale below which a mean-flow term is treated as resonant
TERM_RESONANCE_TOL = 1e-10


class ResonanceError(ArithmeticError):
    """A closed-form denominator vanished; perturb the parameters slightly."""


class DegenerateGeometryError(ArithmeticError):
    pass


def _as_output(y, values):
    return values if np.ndim(y) else np.asarray(values)[()]


def _hyp(z, order: int):
    # d^n/dz^n sinh z
    return np.cosh(z) if order % 2 else np.sinh(z)


# ---------------------------------------------------------------------------
# zeroth order
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZerothOrderFlow:
    """Porous Poiseuille flow driven by an imposed pressure gradient.

    ``A0`` and ``C0`` are undefined in the Darcy-free limit (k = inf); they are
    then reported as ``nan`` and the stream function uses its analytic limit.
    """

    A0: float
    C0: float
    imposed_dp0: float


def zeroth_order_flow(params: FlowParameters, imposed_dp0: float) -> ZerothOrderFlow:
    m = math.sqrt(params.e_over_k)
    if m == 0.0:
        return ZerothOrderFlow(math.nan, math.nan, imposed_dp0)
    c0 = m * math.cosh(m) + params.slip_s * m * m * math.sinh(m)
    a0 = params.darcy_k * params.reynolds_R * imposed_dp0 / c0
    return ZerothOrderFlow(a0, c0, imposed_dp0)


def zeroth_order_stream(params: FlowParameters, imposed_dp0: float, y):
    """psi0(y) = A0 (-C0 y + sinh(sqrt(e/k) y)); odd in y, zero when dp0 = 0."""
    y_arr = np.asarray(y, dtype=float)
    m = math.sqrt(params.e_over_k)
    if m == 0.0:
        e, s, R = params.porosity_e, params.slip_s, params.reynolds_R
        out = R * e * imposed_dp0 * (y_arr**3 / 6.0 - y_arr / 2.0 - s * y_arr)
    else:
        z = zeroth_order_flow(params, imposed_dp0)
        out = z.A0 * (-z.C0 * y_arr + np.sinh(m * y_arr))
    return _as_output(y, out)


# ---------------------------------------------------------------------------
# first order
# ---------------------------------------------------------------------------

def beta_squared(params: FlowParameters) -> complex:
    a = params.wave_number_alpha
    return complex(a * a + params.e_over_k, -a * params.porosity_e * params.reynolds_R)


def compute_beta(params: FlowParameters) -> complex:
    """Principal root (Re >= 0) of alpha^2 + e/k - i alpha e R."""
    return cmath.sqrt(beta_squared(params))


@dataclass(frozen=True)
class FirstOrderCoefficients:
    alpha: float
    beta: complex
    c11: complex
    c12: complex

    def phi1(self, y, order: int = 0):
        """n-th derivative of C11 sinh(alpha y) + C12 sinh(beta y)."""
        y_arr = np.asarray(y, dtype=float)
        a, b = self.alpha, self.beta
        out = (self.c11 * a**order * _hyp(a * y_arr, order)
               + self.c12 * b**order * _hyp(b * y_arr, order))
        return _as_output(y, np.asarray(out, dtype=complex))

    def with_flipped_branch(self) -> "FirstOrderCoefficients":
        # C11 is even and C12 odd under beta -> -beta
        return FirstOrderCoefficients(self.alpha, -self.beta, self.c11, -self.c12)


def first_order_coeffs(params: FlowParameters, branch: int = 1) -> FirstOrderCoefficients:
    """Coefficients of phi1 meeting phi1(+-1) = +-1 and phi1'(+-1) = -+s phi1''(+-1).

    ``branch=-1`` uses -beta instead of the principal root; phi1 itself is
    unchanged, which the property tests rely on.
    """
    validate(params)
    a, s = params.wave_number_alpha, params.slip_s
    b = branch * compute_beta(params)
    sha, cha = math.sinh(a), math.cosh(a)
    shb, chb = cmath.sinh(b), cmath.cosh(b)
    parts = (a * cha * shb, -b * sha * chb, s * (a * a - b * b) * sha * shb)
    den = sum(parts)
    scale = sum(abs(p) for p in parts)
    if abs(den) < RESONANCE_TOL * scale:
        raise ResonanceError(
            f"first-order determinant vanishes (|den|={abs(den):.3e}, scale={scale:.3e}); "
            "perturb alpha, R, e or k slightly"
        )
    c11 = -(b * chb + s * b * b * shb) / den
    c12 = (a * cha + s * a * a * sha) / den
    return FirstOrderCoefficients(a, b, c11, c12)


def phi1(coeffs: FirstOrderCoefficients, y):
    return coeffs.phi1(y, 0)


def phi1_derivative(coeffs: FirstOrderCoefficients, y, order: int):
    if order not in (1, 2, 3, 4):
        raise ValueError(f"order must be 1, 2, 3 or 4 (got {order})")
    return coeffs.phi1(y, order)


def compute_D_complex(params: FlowParameters, coeffs: FirstOrderCoefficients) -> complex:
    """Wall value phi20'(1) + s phi20''(1), summed as conjugate pairs.

    Returned complex so callers can inspect the imaginary residue; it is
    zero up to rounding.
    """
    a, s = coeffs.alpha, params.slip_s
    b, bc = coeffs.beta, coeffs.beta.conjugate()
    c11, c12 = coeffs.c11, coeffs.c12
    c11r = c11 + c11.conjugate()
    second = a * a * c11r * math.sinh(a) + b * b * c12 * cmath.sinh(b) \
        + bc * bc * c12.conjugate() * cmath.sinh(bc)
    third = a**3 * c11r * math.cosh(a) + b**3 * c12 * cmath.cosh(b) \
        + bc**3 * c12.conjugate() * cmath.cosh(bc)
    return -0.5 * (second + s * third)


def compute_D(params: FlowParameters, coeffs: FirstOrderCoefficients | None = None) -> float:
    if coeffs is None:
        coeffs = first_order_coeffs(params)
    return compute_D_complex(params, coeffs).real


# ---------------------------------------------------------------------------
# mean flow
# ---------------------------------------------------------------------------

_TERM_LABELS = ("alpha+beta", "alpha-beta", "alpha+conj(beta)", "alpha-conj(beta)",
                "beta+conj(beta)", "beta-conj(beta)")


def _mean_flow_terms(params: FlowParameters, coeffs: FirstOrderCoefficients):
    """Amplitudes A_j and wavenumbers w_j with f(y) = sum_j A_j cosh(w_j y)."""
    a = coeffs.alpha
    b, bc = coeffs.beta, coeffs.beta.conjugate()
    c11, c12 = coeffs.c11, coeffs.c12
    lam = a * params.porosity_e * params.reynolds_R
    ek = params.e_over_k
    pref = -0.25j * lam
    products = (
        (1j * lam - ek) * c11.conjugate() * c12,
        (1j * lam + ek) * c11 * c12.conjugate(),
        2j * lam * c12 * c12.conjugate(),
    )
    partners = ((a, b), (a, bc), (b, bc))
    amps, waves = [], []
    for prod, (p, q) in zip(products, partners):
        for sign in (1, -1):
            w = p + sign * q
            den = w * w - ek
            if abs(den) < TERM_RESONANCE_TOL * max(ek, abs(w * w), 1e-300):
                label = _TERM_LABELS[len(waves)]
                raise ResonanceError(
                    f"mean-flow term cosh(({label}) y) is resonant: "
                    f"({label})^2 - e/k = {den:.3e}"
                )
            amps.append(pref * sign * prod / den)
            waves.append(w)
    return np.array(amps, dtype=complex), np.array(waves, dtype=complex)


@dataclass(frozen=True)
class MeanFlowSolution:
    """Everything the time-averaged field needs, precomputed once per parameter set."""

    params: FlowParameters
    coeffs: FirstOrderCoefficients
    D: float
    D_imag: float
    amplitudes: np.ndarray = field(repr=False, compare=False)
    wavenumbers: np.ndarray = field(repr=False, compare=False)

    @property
    def _m(self) -> float:
        return math.sqrt(self.params.e_over_k)

    @property
    def f_terms(self) -> tuple[tuple[complex, complex], ...]:
        return tuple(zip(self.amplitudes.tolist(), self.wavenumbers.tolist()))

    @property
    def wall_factor(self) -> float:
        return wall_factor(self._m, self.params.slip_s)

    def f_complex(self, y, order: int = 0):
        y_arr = np.asarray(y, dtype=float)
        z = np.multiply.outer(y_arr, self.wavenumbers)
        hyp = np.sinh(z) if order % 2 else np.cosh(z)
        out = hyp @ (self.amplitudes * self.wavenumbers**order)
        return _as_output(y, np.asarray(out))

    def f(self, y, order: int = 0):
        return _as_output(y, np.real(self.f_complex(y, order)))

    def wall_mismatch(self) -> float:
        """f(1) + s f'(1): what the particular solution leaves at the wall."""
        return float(self.f(1.0) + self.params.slip_s * self.f(1.0, 1))

    def phi20_prime(self, dp2_mean: float | None = None, y=0.0, order: int = 0):
        if dp2_mean is None:
            dp2_mean = self.params.dp2_mean
        p = self.params
        m = self._m
        out = (self.f(y, order)
               + (self.D - self.wall_mismatch()) * cosh_ratio(m, p.slip_s, y, order)
               - p.reynolds_R * dp2_mean * pressure_shape(p.porosity_e, m, p.slip_s, y, order))
        return _as_output(y, np.asarray(out))

    def mean_velocity(self, dp2_mean: float | None = None, y=0.0):
        eps = self.params.amplitude_ratio_eps
        return 0.5 * eps * eps * self.phi20_prime(dp2_mean, y)

    def G(self, y, order: int = 0):
        m = self._m
        out = self.f(y, order) - self.wall_mismatch() * cosh_ratio(m, self.params.slip_s, y, order)
        return _as_output(y, np.asarray(out))

    def F(self, y, order: int = 0):
        a, R = self.params.wave_number_alpha, self.params.reynolds_R
        return -200.0 / (a * a * R * R) * self.G(y, order)

    def critical_pressure(self, form: str = "root") -> float:
        """Mean pressure gradient at which u_mean(0) = 0.

        ``form="root"`` is the exact root of the centre-line condition.
        ``form="displayed"`` multiplies f(0) by cosh m + m sinh m, i.e. with
        the slip factor dropped from that one weight; the two coincide when
        s = 1 or m = 0.
        """
        p = self.params
        m, s = self._m, p.slip_s
        if form == "root":
            centre_weight = self.wall_factor
        elif form == "displayed":
            centre_weight = math.cosh(m) + m * math.sinh(m)
        else:
            raise ValueError(f"unknown form {form!r}")
        gap = p.reynolds_R * pressure_gap(p.porosity_e, m, s)
        if not (math.isfinite(gap) and gap > 0):
            raise DegenerateGeometryError(f"2kR(Q-1) = {gap!r}; reflux condition undefined")
        num = float(self.f(0.0)) * centre_weight + self.D - self.wall_mismatch()
        return num / gap


def solve_mean_flow(params: FlowParameters,
                    coeffs: FirstOrderCoefficients | None = None) -> MeanFlowSolution:
    validate(params)
    if coeffs is None:
        return _cached_mean_flow(params)
    return _build_mean_flow(params, coeffs)


def _build_mean_flow(params, coeffs):
    d = compute_D_complex(params, coeffs)
    amps, waves = _mean_flow_terms(params, coeffs)
    return MeanFlowSolution(params, coeffs, d.real, d.imag, amps, waves)


@lru_cache(maxsize=512)
def _cached_mean_flow(params: FlowParameters) -> MeanFlowSolution:
    return _build_mean_flow(params, first_order_coeffs(params))


def f_of_y(params: FlowParameters, coeffs: FirstOrderCoefficients, y, order: int = 0):
    return solve_mean_flow(params, coeffs).f(y, order)


def phi20_prime(params: FlowParameters, dp2_mean: float | None = None, y=0.0, order: int = 0):
    return solve_mean_flow(params).phi20_prime(dp2_mean, y, order)


def mean_velocity(params: FlowParameters, dp2_mean: float | None = None, y=0.0):
    """Time-averaged axial velocity eps^2/2 * phi20'(y)."""
    return solve_mean_flow(params).mean_velocity(dp2_mean, y)


def G_of_y(params: FlowParameters, coeffs: FirstOrderCoefficients | None, y, order: int = 0):
    return solve_mean_flow(params, coeffs).G(y, order)


def F_of_y(params: FlowParameters, coeffs: FirstOrderCoefficients | None, y):
    """Scaled velocity perturbation -200/(alpha R)^2 * G(y)."""
    return solve_mean_flow(params, coeffs).F(y)


def critical_reflux_pressure(params: FlowParameters, form: str = "root") -> float:
    return solve_mean_flow(params).critical_pressure(form)


def darcy_free_limit(params: FlowParameters, porosity_e: float = 1.0,
                     slip_s: float = 0.0) -> FlowParameters:
    """Same R, alpha, eps, dp2 with k = inf.

    With the default e = 1, s = 0 this is the classical no-slip clear channel.
    """
    return FlowParameters(params.reynolds_R, params.wave_number_alpha, porosity_e, math.inf,
                          slip_s, params.amplitude_ratio_eps, params.dp2_mean)


# ---------------------------------------------------------------------------
# sampled profiles
# ---------------------------------------------------------------------------

class Quantity(str, Enum):
    PHI1_RE = "phi1_re"
    PHI1_IM = "phi1_im"
    F = "F"
    G = "G"
    MEAN_VELOCITY = "mean_velocity"
    PHI20_PRIME = "phi20_prime"


@dataclass(frozen=True)
class Profile:
    params: FlowParameters
    quantity: Quantity
    y: np.ndarray = field(compare=False)
    values: np.ndarray = field(compare=False)
    label: str = ""

    def __post_init__(self):
        if self.y.shape != self.values.shape or self.y.ndim != 1:
            raise ValueError("y and values must be 1-D arrays of equal length")
        if np.any(np.diff(self.y) <= 0):
            raise ValueError("profile abscissae must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"non-finite values in {self.quantity.value} profile")

    @property
    def samples(self) -> list[tuple[float, float]]:
        return list(zip(self.y.tolist(), self.values.tolist()))


def evaluate_quantity(params: FlowParameters, quantity: Quantity | str, y,
                      dp2_mean: float | None = None):
    quantity = Quantity(quantity)
    sol = solve_mean_flow(params)
    if quantity is Quantity.PHI1_RE:
        return np.real(sol.coeffs.phi1(y))
    if quantity is Quantity.PHI1_IM:
        return np.imag(sol.coeffs.phi1(y))
    if quantity is Quantity.F:
        return sol.F(y)
    if quantity is Quantity.G:
        return sol.G(y)
    if quantity is Quantity.MEAN_VELOCITY:
        return sol.mean_velocity(dp2_mean, y)
    return sol.phi20_prime(dp2_mean, y)


def sample_profile(params: FlowParameters, quantity: Quantity | str, n: int = 201,
                   dp2_mean: float | None = None, label: str = "") -> Profile:
    y = np.linspace(-1.0, 1.0, n)
    values = np.asarray(evaluate_quantity(params, quantity, y, dp2_mean), dtype=float)
    if dp2_mean is not None:
        params = params.with_values(dp2=dp2_mean)
    return Profile(params, Quantity(quantity), y, values, label)
