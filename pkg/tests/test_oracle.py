import math
import warnings

import numpy as np
import pytest

from conftest import ANCHOR, FIG3, FIG4, FIG9
from peristaltic import core, oracle
from peristaltic.params import FlowParameters


def closed_phi1(p):
    return core.first_order_coeffs(p).phi1


def test_fig3_first_order_matches_closed_form():
    sol = oracle.solve_phi1_bvp(FIG3, 2001)
    assert sol.max_deviation(closed_phi1(FIG3)) < 1e-5
    assert max(sol.boundary_residuals) < 1e-12
    assert sol.solver_report["condition_estimate"] < oracle.CONDITION_LIMIT


def test_fig3_coefficients_recovered_from_grid():
    # least-squares fit of the discrete solution onto the sinh basis
    sol = oracle.solve_phi1_bvp(FIG3, 2001)
    c = core.first_order_coeffs(FIG3)
    y = sol.grid.nodes
    basis = np.column_stack([np.sinh(c.alpha * y), np.sinh(c.beta * y)])
    fit = np.linalg.lstsq(basis, sol.values, rcond=None)[0]
    assert fit[0] == pytest.approx(c.c11, rel=1e-4)
    assert fit[1] == pytest.approx(c.c12, rel=1e-4)


@pytest.mark.parametrize("p", [FIG3, ANCHOR, FlowParameters(25.0, 0.45, 0.6, 0.1, 0.008)])
def test_second_order_convergence(p):
    exact = closed_phi1(p)
    errors = [oracle.solve_phi1_bvp(p, n).max_deviation(exact) for n in (251, 501, 1001)]
    orders = [math.log2(errors[i] / errors[i + 1]) for i in range(2)]
    assert all(1.7 <= o <= 2.3 for o in orders), orders


def test_clear_channel_limit_oracle():
    p = FlowParameters(1.0, 0.4, 1.0, 1e8, 0.0)
    clear = core.first_order_coeffs(core.darcy_free_limit(p)).phi1
    assert oracle.solve_phi1_bvp(p, 2001).max_deviation(clear) < 1e-5


def test_fig9_mean_flow_matches_closed_form():
    sol = oracle.reconstruct_phi20_prime(FIG9, grid=2001)
    exact = core.solve_mean_flow(FIG9)
    assert sol.max_deviation(lambda y: exact.phi20_prime(None, y)) < 1e-5
    # centre value quoted as a regression in test_core
    centre = 0.5 * FIG9.eps**2 * sol.values[1000]
    assert centre == pytest.approx(0.18363255338358914, rel=1e-5)


def test_fully_numerical_route():
    sol = oracle.reconstruct_phi20_prime(FIG9, grid=2001, forcing_source="bvp")
    exact = core.solve_mean_flow(FIG9)
    assert sol.max_deviation(lambda y: exact.phi20_prime(None, y)) < 1e-4
    with pytest.raises(ValueError):
        oracle.reconstruct_phi20_prime(FIG9, grid=201, forcing_source="other")


def test_critical_pressure_zeroes_centre():
    crit = core.critical_reflux_pressure(ANCHOR)
    sol = oracle.reconstruct_phi20_prime(ANCHOR, crit, 2001)
    assert abs(sol.values[1000]) < 1e-5


def test_oracle_wall_value_is_D():
    p = FIG3
    first = oracle.solve_phi1_bvp(p, 2001)
    d2, d3 = oracle.bvp_wall_derivatives(first, p.alpha)
    numeric = -d2.real - p.s * d3.real
    assert numeric == pytest.approx(core.compute_D(p), rel=1e-5)
    sol = oracle.reconstruct_phi20_prime(p, 0.0, 2001)
    h = sol.grid.h
    w = sol.values
    wall = w[-1] + p.s * (3 * w[-1] - 4 * w[-2] + w[-3]) / (2 * h)
    assert wall == pytest.approx(core.compute_D(p), rel=1e-8)


def test_fig4_centre_against_reconstruction():
    # f(0) = phi20'(0) - (D - f(1) - s f'(1)) / Q  at dp2 = 0
    sol = core.solve_mean_flow(FIG4)
    w = oracle.reconstruct_phi20_prime(FIG4, 0.0, 2001).values
    q = sol.wall_factor
    f0 = w[1000] - (sol.D - sol.wall_mismatch()) / q
    assert f0 == pytest.approx(-1.9805804245617722, rel=1e-5)


def test_zero_forcing_gives_homogeneous_solution():
    grid = oracle.Grid1D.uniform(1001)
    m2, s, wall, c20 = 0.9, 0.01, 0.7, 0.0
    sol = oracle.solve_mean_flow_bvp(m2, s, lambda y: 0.0 * y, wall, c20, grid)
    m = math.sqrt(m2)
    amp = wall / (math.cosh(m) + s * m * math.sinh(m))
    np.testing.assert_allclose(sol.values, amp * np.cosh(m * grid.nodes), atol=1e-6)
    flat = oracle.solve_mean_flow_bvp(0.0, 0.0, lambda y: 0.0 * y, wall, 0.0, grid)
    np.testing.assert_allclose(flat.values, wall, atol=1e-12)


def test_zero_forcing_with_zero_coefficients():
    p = ANCHOR
    zero = core.FirstOrderCoefficients(p.alpha, core.compute_beta(p), 0j, 0j)
    sol = oracle.reconstruct_phi20_prime(p, 0.0, 1001, coeffs=zero)
    assert np.max(np.abs(sol.values)) < 1e-14


def test_residual_of_closed_form_first_order():
    for p in (FIG3, ANCHOR, FIG9.with_values(k=0.05)):
        c = core.first_order_coeffs(p)
        norm = np.max(np.abs(c.phi1(oracle.chebyshev_points(50))))
        assert oracle.residual_scan(c.phi1, "eq22", p, 50) < 1e-9 * norm
        assert oracle.residual_scan(c.phi1, "first_order", p, 50) < 1e-9 * norm


def test_residual_detects_perturbed_coefficient():
    p = FIG3
    c = core.first_order_coeffs(p)
    bad = core.FirstOrderCoefficients(c.alpha, c.beta, c.c11 * (1 + 1e-6), c.c12)
    good = oracle.residual_scan(c.phi1, "eq22", p)
    worse = oracle.residual_scan(bad.phi1, "eq22", p)
    assert worse >= 1e3 * max(good, 1e-300)


def test_residual_without_walls_is_blind_to_coefficients():
    # every basis function solves the interior operator on its own
    p = FIG3
    c = core.first_order_coeffs(p)
    bad = core.FirstOrderCoefficients(c.alpha, c.beta, c.c11 * (1 + 1e-6), c.c12)
    scale = np.max(np.abs(bad.phi1(oracle.chebyshev_points(50), 4)))
    assert oracle.residual_scan(bad.phi1, "eq22", p, boundary=False) < 1e-12 * scale


def test_residual_of_zero_field():
    def zero(y, order=0):
        return np.zeros_like(np.asarray(y, dtype=float)) * 0j
    assert oracle.residual_scan(zero, "eq22", FIG3, boundary=False) == 0.0


def test_residual_of_closed_form_mean_flow():
    for p in (FIG9, FIG4, FIG9.with_values(k=0.05, s=0.01)):
        sol = core.solve_mean_flow(p)
        r = oracle.residual_scan(lambda y, o: sol.phi20_prime(None, y, o), "mean_flow", p)
        assert r < 1e-8


def test_residual_unknown_equation():
    with pytest.raises(ValueError, match="unknown equation"):
        oracle.residual_scan(closed_phi1(FIG3), "eq99", FIG3)


def test_boundary_layer_warning():
    p = ANCHOR.with_values(k=0.001)
    with pytest.warns(oracle.BoundaryLayerWarning):
        sol = oracle.solve_phi1_bvp(p, 251)
    assert "warnings" in sol.solver_report
    with warnings.catch_warnings():
        warnings.simplefilter("error", oracle.BoundaryLayerWarning)
        oracle.solve_phi1_bvp(p, 2001)


def test_ill_conditioned_system_reported(monkeypatch):
    monkeypatch.setattr(oracle, "CONDITION_LIMIT", 10.0)
    with pytest.raises(oracle.OracleError) as info:
        oracle.solve_phi1_bvp(FIG3, 501)
    assert info.value.report["condition_estimate"] > 10.0


def test_grid_too_coarse():
    with pytest.raises(ValueError):
        oracle.Grid1D.uniform(3)
    with pytest.raises(ValueError):
        oracle.solve_phi1_bvp(FIG3, 101)


def test_chebyshev_points():
    y = oracle.chebyshev_points(50)
    assert y[0] == -1.0 and y[-1] == 1.0 and np.all(np.diff(y) > 0)
