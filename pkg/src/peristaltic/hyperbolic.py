"""Hyperbolic ratios that stay finite for large arguments and accurate for small ones.

The mean-flow fields contain ``cosh(m y) / Q`` and ``1 - cosh(m y) / Q`` with
``Q = cosh m + s m sinh m`` and ``m = sqrt(e/k)``. ``m`` ranges from 0 (clear
fluid, k -> inf) to a few units (k ~ 0.05), so both ends need care: large ``m``
overflows the plain ratio, small ``m`` loses every digit of ``1 - cosh/Q``.
"""

from __future__ import annotations

import numpy as np

#: above this the ratios are evaluated in exponentially scaled form
LARGE_ARGUMENT = 30.0


def sinhc(x):
    """sinh(x)/x with the removable singularity filled in."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x * x / 6.0, np.sinh(safe) / safe)


def wall_factor(m: float, s: float) -> float:
    """Q = cosh m + s m sinh m."""
    return float(np.cosh(m) + s * m * np.sinh(m))


def _scaled_denominator(m: float, s: float) -> float:
    # Q * 2 exp(-m)
    em = np.exp(-2.0 * m)
    return 1.0 + em + s * m * (1.0 - em)


def cosh_ratio(m: float, s: float, y, order: int = 0):
    """n-th y-derivative of cosh(m y)/Q."""
    y = np.asarray(y, dtype=float)
    if m == 0.0:
        return np.ones_like(y) if order == 0 else np.zeros_like(y)
    if m > LARGE_ARGUMENT:
        ay = np.abs(y)
        grow = np.exp(m * (ay - 1.0))
        tail = np.exp(-2.0 * m * ay)
        if order % 2 == 0:
            body = grow * (1.0 + tail)
        else:
            body = np.sign(y) * grow * (1.0 - tail)
        return m**order * body / _scaled_denominator(m, s)
    q = wall_factor(m, s)
    hyp = np.cosh(m * y) if order % 2 == 0 else np.sinh(m * y)
    return m**order * hyp / q


def one_minus_cosh_ratio(m: float, s: float, y):
    """1 - cosh(m y)/Q without cancellation near m = 0."""
    y = np.asarray(y, dtype=float)
    if m > LARGE_ARGUMENT:
        return 1.0 - cosh_ratio(m, s, y)
    q = wall_factor(m, s)
    num = 2.0 * np.sinh(0.5 * m * (1.0 + y)) * np.sinh(0.5 * m * (1.0 - y)) + s * m * np.sinh(m)
    return num / q


def pressure_shape(e: float, m: float, s: float, y, order: int = 0):
    """n-th derivative of 2k(1 - cosh(m y)/Q) with k = e/m^2.

    Finite as m -> 0, where it tends to e(1 - y^2 + 2s): the parabolic
    Poiseuille shape of the clear-fluid channel.
    """
    y = np.asarray(y, dtype=float)
    if m > LARGE_ARGUMENT:
        if order == 0:
            return 2.0 * e / m**2 * one_minus_cosh_ratio(m, s, y)
        return -2.0 * e / m**2 * cosh_ratio(m, s, y, order)
    q = wall_factor(m, s)
    if order == 0:
        a, b = 0.5 * (1.0 + y), 0.5 * (1.0 - y)
        return (4.0 * e * a * b * sinhc(a * m) * sinhc(b * m) + 2.0 * e * s * sinhc(m)) / q
    if order == 1:
        return -2.0 * e * y * sinhc(m * y) / q
    hyp = np.cosh(m * y) if order % 2 == 0 else np.sinh(m * y)
    return -2.0 * e * m ** (order - 2) * hyp / q


def pressure_gap(e: float, m: float, s: float) -> float:
    """2k(Q - 1) with k = e/m^2, finite as m -> 0 where it tends to e(1 + 2s)."""
    return float(e * sinhc(0.5 * m) ** 2 + 2.0 * e * s * sinhc(m))
