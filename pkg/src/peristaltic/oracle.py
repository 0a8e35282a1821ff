"""Finite-difference solutions of the perturbation ODEs.

These solvers check the closed forms in :mod:`peristaltic.core` by a route
that shares none of their algebra. The only shared surface is the triple
(beta, C11, C12), which the mean-flow forcing needs; from it the oracle
evaluates phi1 directly and never touches the expanded f(y), D or
critical-pressure formulas.

Both problems use second-order central differences on a uniform grid and a
banded LU solve.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded
from scipy.sparse.linalg import LinearOperator, onenormest, splu

from .params import FlowParameters, validate

CONDITION_LIMIT = 1e14
BOUNDARY_RESIDUAL_LIMIT = 1e-8
MIN_PHI1_POINTS = 201


class OracleError(RuntimeError):
    def __init__(self, message: str, report: dict | None = None):
        super().__init__(message)
        self.report = report or {}


class BoundaryLayerWarning(UserWarning):
    """The porous boundary layer sqrt(k/e) is under-resolved by the grid."""


@dataclass(frozen=True)
class Grid1D:
    n_points: int
    nodes: np.ndarray = field(repr=False, compare=False)
    h: float

    @classmethod
    def uniform(cls, n_points: int) -> "Grid1D":
        if n_points < 5:
            raise ValueError(f"grid needs at least 5 points (got {n_points})")
        nodes = np.linspace(-1.0, 1.0, n_points)
        return cls(n_points, nodes, 2.0 / (n_points - 1))


@dataclass
class BvpSolution:
    grid: Grid1D
    values: np.ndarray
    boundary_residuals: tuple[float, float, float, float]
    solver_report: dict
    ghosts: tuple[complex, complex] | None = None
    #: (D2 - alpha^2) phi at the nodes, phi1 solves only
    chi: np.ndarray | None = field(default=None, repr=False)

    def max_deviation(self, reference) -> float:
        """Sup-norm distance to ``reference`` sampled on the same nodes."""
        ref = np.asarray(reference(self.grid.nodes) if callable(reference) else reference)
        return float(np.max(np.abs(self.values - ref)))


def _to_dia(ab: np.ndarray, lower: int, upper: int):
    offsets = list(range(upper, -lower - 1, -1))
    n = ab.shape[1]
    return sp.dia_matrix((ab, offsets), shape=(n, n)).tocsc()


def _condition_estimate(ab: np.ndarray, lower: int, upper: int) -> float:
    """1-norm condition estimate kappa_1 ~ ||A||_1 ||A^-1||_1 (Hager/Higham)."""
    a = _to_dia(ab, lower, upper)
    lu = splu(a)
    n = a.shape[0]
    inv = LinearOperator(
        (n, n),
        matvec=lu.solve,
        rmatvec=lambda x: lu.solve(np.asarray(x, dtype=a.dtype), trans="H"),
        dtype=a.dtype,
    )
    norm_a = float(abs(a).sum(axis=0).max())
    return norm_a * float(onenormest(inv))


def _banded_solve(ab, rhs, lower, upper, what: str):
    cond = _condition_estimate(ab, lower, upper)
    report = {"system": what, "unknowns": ab.shape[1], "bandwidth": (lower, upper),
              "condition_estimate": cond, "factorization": "LAPACK gbsv (partial pivoting)"}
    if not math.isfinite(cond) or cond > CONDITION_LIMIT:
        raise OracleError(f"{what}: system ill-conditioned (cond ~ {cond:.2e})", report)
    x = solve_banded((lower, upper), ab, rhs)
    return x, report


def _check_layer(params: FlowParameters, grid: Grid1D, report: dict) -> None:
    ek = params.e_over_k
    if ek == 0.0:
        return
    width = math.sqrt(1.0 / ek)
    if width < 5.0 * grid.h:
        msg = (f"boundary layer sqrt(k/e) = {width:.3g} is below 5h = {5 * grid.h:.3g}; "
               "refine the grid")
        report.setdefault("warnings", []).append(msg)
        warnings.warn(msg, BoundaryLayerWarning, stacklevel=3)


def _first_order_symbol(params: FlowParameters) -> tuple[complex, complex]:
    """P, Q0 of phi'''' - P phi'' + Q0 phi = 0 (the first-order operator, A0 = 0)."""
    a2 = params.wave_number_alpha ** 2
    lam = params.wave_number_alpha * params.porosity_e * params.reynolds_R
    inner = a2 + params.e_over_k - 1j * lam
    return a2 + inner, a2 * inner


def solve_phi1_bvp(params: FlowParameters, grid: Grid1D | int = 2001) -> BvpSolution:
    """Solve (D^2 - alpha^2 - e/k + i alpha e R)(D^2 - alpha^2) phi = 0.

    Walls: phi(+-1) = +-1 and phi'(+-1) = -+s phi''(+-1). The operator is
    kept factored: with D2 the 3-point second difference and one ghost node
    beyond each wall,

        (D2 - alpha^2) phi = chi   at every node,
        (D2 - beta^2) chi = 0      at interior nodes,

    which after eliminating chi is the 5-point product stencil, but the
    coupled system is conditioned like a second-order problem. Unknowns are
    interleaved (phi_i, h^2 chi_i) so the matrix is banded with (4, 3)
    sub/super-diagonals.
    """
    validate(params)
    if isinstance(grid, int):
        grid = Grid1D.uniform(grid)
    if grid.n_points < MIN_PHI1_POINTS:
        raise ValueError(f"phi1 oracle needs n_points >= {MIN_PHI1_POINTS} (got {grid.n_points})")
    n, h, s = grid.n_points, grid.h, params.slip_s
    a2h2 = params.wave_number_alpha ** 2 * h * h
    lam = params.wave_number_alpha * params.porosity_e * params.reynolds_R
    b2h2 = (params.wave_number_alpha ** 2 + params.e_over_k - 1j * lam) * h * h
    size = 2 * n + 2
    lower, upper = 4, 3
    ab = np.zeros((lower + upper + 1, size), dtype=complex)
    rhs = np.zeros(size, dtype=complex)

    # layout: ghost, phi_0, chi_0, ..., phi_{n-1}, chi_{n-1}, ghost
    # (phi_i in column 2i + 1, h^2 chi_i in column 2i + 2)
    def put(row, col, value):
        ab[upper + row - col, col] = value

    nodes = np.arange(n)
    phi_col = 2 * nodes + 1
    chi_col = 2 * nodes + 2
    left = np.concatenate(([0], phi_col[:-1]))
    right = np.concatenate((phi_col[1:], [size - 1]))
    # (D2 - alpha^2) phi - chi = 0 at every node, row 2i + 1
    rows = phi_col
    for col, coef in ((left, 1.0), (rows, -2.0 - a2h2), (right, 1.0), (chi_col, -1.0)):
        ab[upper + rows - col, col] = coef
    # (D2 - beta^2) chi = 0 at interior nodes, row 2i + 2
    rows = chi_col[1:-1]
    for col, coef in ((rows - 2, 1.0), (rows, -2.0 - b2h2), (rows + 2, 1.0)):
        ab[upper + rows - col, col] = coef
    # y = -1: slip in row 0, Dirichlet in the unused chi_0 row
    put(0, 0, -1.0 - 2.0 * s / h)
    put(0, 1, 4.0 * s / h)
    put(0, 3, 1.0 - 2.0 * s / h)
    put(2, 1, 1.0)
    rhs[2] = -1.0
    # y = +1: Dirichlet in the unused chi_{n-1} row, slip in the last row
    put(2 * n, 2 * n - 1, 1.0)
    rhs[2 * n] = 1.0
    last = 2 * n + 1
    put(last, 2 * n - 3, -1.0 + 2.0 * s / h)
    put(last, 2 * n - 1, -4.0 * s / h)
    put(last, last, 1.0 + 2.0 * s / h)

    x, report = _banded_solve(ab, rhs, lower, upper, "phi1 fourth-order BVP (factored)")
    _check_layer(params, grid, report)
    u = x[phi_col]
    gl, gr = x[0], x[-1]
    d1l, d2l = (u[1] - gl) / (2 * h), (u[1] - 2 * u[0] + gl) / h**2
    d1r, d2r = (gr - u[-2]) / (2 * h), (gr - 2 * u[-1] + u[-2]) / h**2
    residuals = (abs(u[0] + 1.0), abs(u[-1] - 1.0),
                 abs(d1l - s * d2l) * h, abs(d1r + s * d2r) * h)
    _check_boundary(residuals, report)
    chi = x[chi_col] / (h * h)
    return BvpSolution(grid, u, tuple(float(r) for r in residuals), report, (gl, gr), chi)


def _check_boundary(residuals, report):
    report["max_boundary_residual"] = max(residuals)
    if max(residuals) > BOUNDARY_RESIDUAL_LIMIT:
        raise OracleError(f"boundary conditions not met (max residual {max(residuals):.2e})",
                          report)


def bvp_wall_derivatives(sol: BvpSolution, alpha: float) -> tuple[complex, complex]:
    """phi1''(1) and phi1'''(1) from a :func:`solve_phi1_bvp` solution, both O(h^2).

    Uses phi'' = chi + alpha^2 phi and phi''' = chi' + alpha^2 phi', with a
    central phi' through the ghost node and a one-sided 3-point chi'.
    """
    u, chi, h = sol.values, sol.chi, sol.grid.h
    d1 = (sol.ghosts[1] - u[-2]) / (2 * h)
    dchi = (3 * chi[-1] - 4 * chi[-2] + chi[-3]) / (2 * h)
    return chi[-1] + alpha**2 * u[-1], dchi + alpha**2 * d1


# ---------------------------------------------------------------------------
# mean flow
# ---------------------------------------------------------------------------

def phi1_from_coefficients(alpha: float, beta: complex, c11: complex, c12: complex):
    """phi1(y, order) built straight from the sinh basis."""

    def phi(y, order: int = 0):
        y = np.asarray(y, dtype=float)
        pick = np.cosh if order % 2 else np.sinh
        return c11 * alpha**order * pick(alpha * y) + c12 * beta**order * pick(beta * y)

    return phi


def _coefficient_triple(params, coeffs):
    if coeffs is None:
        from .core import first_order_coeffs  # shared surface: beta, C11, C12 only

        coeffs = first_order_coeffs(params)
    return coeffs.alpha, coeffs.beta, coeffs.c11, coeffs.c12


def mean_flow_forcing(params: FlowParameters, phi: Callable) -> Callable:
    """Right side -(i alpha e R/2)(phi1 phi1*'' - phi1* phi1'') as a real function of y."""
    lam = params.wave_number_alpha * params.porosity_e * params.reynolds_R

    def g(y):
        p0, p2 = phi(y, 0), phi(y, 2)
        return lam * np.imag(p0 * np.conj(p2))

    return g


def wall_value(params: FlowParameters, phi: Callable) -> float:
    """phi20'(1) + s phi20''(1) read off the second-order slip condition."""
    return float(-np.real(phi(1.0, 2)) - params.slip_s * np.real(phi(1.0, 3)))


def solve_mean_flow_bvp(e_over_k: float, slip_s: float, forcing: Callable, wall: float,
                        c20: float, grid: Grid1D) -> BvpSolution:
    """Solve w'' - (e/k) w = forcing(y) + 2 c20 with w(+-1) +- s w'(+-1) = wall."""
    n, h, s = grid.n_points, grid.h, slip_s
    y = grid.nodes
    lower = upper = 2
    ab = np.zeros((lower + upper + 1, n))
    rhs = np.zeros(n)

    def put(row, col, value):
        ab[upper + row - col, col] += value

    # w(-1) - s w'(-1) = wall, one-sided 3-point w'
    put(0, 0, 1.0 + 3.0 * s / (2 * h))
    put(0, 1, -4.0 * s / (2 * h))
    put(0, 2, s / (2 * h))
    rhs[0] = wall
    rows = np.arange(1, n - 1)
    ab[upper - 1, rows + 1] = 1.0
    ab[upper, rows] = -2.0 - e_over_k * h * h
    ab[upper + 1, rows - 1] = 1.0
    rhs[1:-1] = h * h * (np.asarray(forcing(y[1:-1]), dtype=float) + 2.0 * c20)
    # w(1) + s w'(1) = wall
    put(n - 1, n - 1, 1.0 + 3.0 * s / (2 * h))
    put(n - 1, n - 2, -4.0 * s / (2 * h))
    put(n - 1, n - 3, s / (2 * h))
    rhs[-1] = wall

    w, report = _banded_solve(ab, rhs, lower, upper, "mean-flow second-order BVP")
    dl = (-3 * w[0] + 4 * w[1] - w[2]) / (2 * h)
    dr = (3 * w[-1] - 4 * w[-2] + w[-3]) / (2 * h)
    interior = np.abs((w[:-2] - 2 * w[1:-1] + w[2:]) - h * h * e_over_k * w[1:-1]
                      - rhs[1:-1])
    residuals = (abs(w[0] - s * dl - wall), abs(w[-1] + s * dr - wall),
                 float(interior[0]), float(interior[-1]))
    _check_boundary(residuals, report)
    return BvpSolution(grid, w, tuple(float(r) for r in residuals), report)


def reconstruct_phi20_prime(params: FlowParameters, dp2_mean: float | None = None,
                            grid: Grid1D | int = 2001, coeffs=None,
                            forcing_source: str = "closed") -> BvpSolution:
    """Numerical phi20' for a given mean pressure gradient.

    ``forcing_source="closed"`` builds the forcing and wall value from phi1
    evaluated on the (beta, C11, C12) basis. ``"bvp"`` takes them from
    :func:`solve_phi1_bvp` on the same grid instead, which removes the last
    shared ingredient at the cost of O(h) in the wall value.
    """
    validate(params)
    if dp2_mean is None:
        dp2_mean = params.dp2_mean
    if isinstance(grid, int):
        grid = Grid1D.uniform(grid)
    c20 = params.porosity_e * params.reynolds_R * dp2_mean
    if forcing_source == "closed":
        phi = phi1_from_coefficients(*_coefficient_triple(params, coeffs))
        forcing, wall = mean_flow_forcing(params, phi), wall_value(params, phi)
        source_report = {}
    elif forcing_source == "bvp":
        first = solve_phi1_bvp(params, grid)
        a = params.wave_number_alpha
        u = first.values
        u2 = first.chi + a * a * u
        lam = a * params.porosity_e * params.reynolds_R
        g_nodes = lam * np.imag(u * np.conj(u2))
        d2, d3 = bvp_wall_derivatives(first, a)
        wall = float(-d2.real - params.slip_s * d3.real)

        def forcing(y):
            return np.interp(y, grid.nodes, g_nodes)

        source_report = {"phi1": first.solver_report}
    else:
        raise ValueError(f"unknown forcing_source {forcing_source!r}")
    sol = solve_mean_flow_bvp(params.e_over_k, params.slip_s, forcing, wall, c20, grid)
    sol.solver_report.update(source_report, wall_value=wall, c20=c20)
    return sol


# ---------------------------------------------------------------------------
# residuals of analytic fields
# ---------------------------------------------------------------------------

EQUATION_ALIASES = {"first_order": "eq22", "mean_flow": "eq32"}


def chebyshev_points(n: int) -> np.ndarray:
    """Chebyshev-Gauss-Lobatto points on [-1, 1], increasing."""
    return np.cos(np.pi * np.arange(n - 1, -1, -1) / (n - 1))


def residual_scan(field: Callable, equation: str, params: FlowParameters, n_samples: int = 50,
                  *, coeffs=None, dp2_mean: float | None = None,
                  boundary: bool = True) -> float:
    """Sup-norm residual of an analytic field in its governing equation.

    ``field(y, order)`` must return the order-th derivative analytically.
    ``equation="eq22"`` (alias ``"first_order"``) is the first-order operator acting on phi1; ``"eq32"``
    (alias ``"mean_flow"``) is the integrated mean-flow equation acting on w = phi20' and needs the
    forcing coefficients. With ``boundary=True`` the wall-condition residuals
    are included in the maximum, since each basis function satisfies the ODE
    on its own and only the walls pin the coefficients.
    """
    equation = EQUATION_ALIASES.get(equation, equation)
    y = chebyshev_points(n_samples)
    if equation == "eq22":
        P, Q0 = _first_order_symbol(params)
        res = field(y, 4) - P * field(y, 2) + Q0 * field(y, 0)
        worst = float(np.max(np.abs(res)))
        if boundary:
            s = params.slip_s
            walls = (field(1.0, 0) - 1.0, field(-1.0, 0) + 1.0,
                     field(1.0, 1) + s * field(1.0, 2), field(-1.0, 1) - s * field(-1.0, 2))
            worst = max(worst, *(abs(complex(w)) for w in walls))
        return worst
    if equation == "eq32":
        if dp2_mean is None:
            dp2_mean = params.dp2_mean
        phi = phi1_from_coefficients(*_coefficient_triple(params, coeffs))
        g = mean_flow_forcing(params, phi)
        c20 = params.porosity_e * params.reynolds_R * dp2_mean
        res = field(y, 2) - params.e_over_k * field(y, 0) - g(y) - 2.0 * c20
        worst = float(np.max(np.abs(res)))
        if boundary:
            s, wall = params.slip_s, wall_value(params, phi)
            walls = (field(1.0, 0) + s * field(1.0, 1) - wall,
                     field(-1.0, 0) - s * field(-1.0, 1) - wall)
            worst = max(worst, *(abs(float(w)) for w in walls))
        return worst
    raise ValueError(f"unknown equation {equation!r} (expected 'eq22' or 'eq32')")
