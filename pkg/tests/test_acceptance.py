"""Acceptance criteria, one test each; every test records a PASS/FAIL line.

Run alone with ``python3 -m pytest tests/test_acceptance.py -v``; the lines
are repeated in the terminal summary under "acceptance criteria".
"""

import math
import time

import numpy as np
import pytest

import reference as ref
from peristaltic import cli, core, io, oracle, sweep, verify
from peristaltic.params import FlowParameters

ANCHOR = FlowParameters(15.0, 0.25, 0.9, 1000.0, 0.0001, 0.1)
N_GRID = 2001
# "coincide within plotting tolerance": gap below 5% of the curve peak
OVERLAY_TOLERANCE = 0.05


def _draws(count, seed):
    return verify.random_draws(count, seed)


def test_1_critical_value_anchor(acceptance_line):
    crit = core.critical_reflux_pressure(ANCHOR)
    rel = abs(abs(crit) - 0.220966) / 0.220966
    timings = []
    for _ in range(50):
        core._cached_mean_flow.cache_clear()
        t0 = time.perf_counter()
        core.critical_reflux_pressure(ANCHOR)
        timings.append(time.perf_counter() - t0)
    fastest = min(timings)
    ok = rel < 1e-3 and fastest < 1e-3
    acceptance_line(1, "critical-value anchor", ok,
                    f"value {crit:.6f}, rel err {rel:.1e}, uncached {fastest * 1e6:.0f} us")
    assert ok


def test_2_reflux_definition(acceptance_line):
    worst, sign_ok = 0.0, True
    for p, _ in _draws(50, 7):
        sol = core.solve_mean_flow(p)
        crit = sol.critical_pressure()
        worst = max(worst, abs(float(sol.mean_velocity(crit, 0.0))))
        d = 1e-3 * max(1.0, abs(crit))
        sign_ok &= bool(sol.mean_velocity(crit - d, 0.0) * sol.mean_velocity(crit + d, 0.0) < 0)
    ok = worst < 1e-10 and sign_ok
    acceptance_line(2, "reflux-definition consistency", ok,
                    f"max |u(0)| {worst:.1e} over 50 draws, root brackets sign: {sign_ok}")
    assert ok


def test_3_first_order_oracle(acceptance_line):
    t0 = time.perf_counter()
    worst = 0.0
    for p, _ in _draws(20, verify.DEFAULT_SEED):
        c = core.first_order_coeffs(p)
        worst = max(worst, oracle.solve_phi1_bvp(p, N_GRID).max_deviation(c.phi1))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-4 and elapsed < 30
    acceptance_line(3, "first-order oracle equivalence", ok,
                    f"sup dev {worst:.1e} at n={N_GRID}, {elapsed:.2f} s")
    assert ok


def test_4_mean_flow_oracle(acceptance_line):
    worst = {"closed": 0.0, "bvp": 0.0}
    t0 = time.perf_counter()
    for p, dp2 in _draws(20, verify.DEFAULT_SEED):
        sol = core.solve_mean_flow(p)
        exact = lambda y: sol.phi20_prime(dp2, y)  # noqa: E731
        for source in worst:
            dev = oracle.reconstruct_phi20_prime(p, dp2, N_GRID, forcing_source=source)\
                .max_deviation(exact)
            worst[source] = max(worst[source], dev)
    elapsed = time.perf_counter() - t0
    ok = max(worst.values()) < 1e-4 and elapsed < 30
    acceptance_line(4, "mean-flow oracle equivalence", ok,
                    f"sup dev {worst['closed']:.1e} (closed forcing), "
                    f"{worst['bvp']:.1e} (numerical forcing), {elapsed:.2f} s")
    assert ok


def test_5_residual_suite(acceptance_line):
    w1 = w2 = 0.0
    ys = oracle.chebyshev_points(50)
    for p, dp2 in _draws(20, 11):
        sol = core.solve_mean_flow(p)
        phi = sol.coeffs.phi1
        w1 = max(w1, oracle.residual_scan(phi, "eq22", p, 50) / np.max(np.abs(phi(ys))))
        w2 = max(w2, oracle.residual_scan(lambda y, o: sol.phi20_prime(dp2, y, o), "eq32", p, 50,
                                          dp2_mean=dp2))
    ok = w1 < 1e-9 and w2 < 1e-8
    acceptance_line(5, "analytic residual suite", ok,
                    f"first order {w1:.1e} x |phi1|, mean flow {w2:.1e}")
    assert ok


def test_6_structural_properties(acceptance_line):
    worst = {}
    for p, dp2 in _draws(100, 13):
        for key, value in verify._structure_errors(p, dp2).items():
            worst[key] = max(worst.get(key, 0.0), value)
    limits = {"parity": 1e-12, "realness": 1e-12, "branch": 1e-12, "bc": 1e-10,
              "reflux_root": 1e-10}
    ok = all(worst[k] < limits[k] for k in limits)
    acceptance_line(6, "parity, realness, branch invariance, wall conditions", ok,
                    ", ".join(f"{k} {worst[k]:.0e}" for k in limits))
    assert ok


def test_7_clear_channel_limit(acceptance_line):
    R, alpha = 1.0, 0.4
    p = FlowParameters(R, alpha, 1.0, 1e8, 0.0)
    sol = core.solve_mean_flow(p)
    # analytic k -> inf reference: beta^2 = alpha^2 - i alpha R, quadrature mean flow
    limit = ref.MeanFlowReference(R, alpha, 1.0, math.inf, 0.0, 0.0)
    y = np.linspace(0, 1, 21)
    F_ref = -200 / (alpha * R) ** 2 * np.array(
        [limit.phi20_prime(t) - limit.D * 1.0 for t in y])  # dp2 = 0: G = phi20' - D
    rels = {
        "beta": abs(sol.coeffs.beta - limit.b) / abs(limit.b),
        "D": abs(sol.D - limit.D) / abs(limit.D),
        "F": float(np.max(np.abs(sol.F(y) - F_ref)) / np.max(np.abs(F_ref))),
        "critical": abs(sol.critical_pressure() - limit.critical_dp2(R, 1.0))
        / abs(limit.critical_dp2(R, 1.0)),
    }
    # the figure overlay: this work at its caption parameters vs the clear channel
    ours, clear = (r.profiles[0].values for r in sweep.run_preset(sweep.figure_preset("fig3")))
    overlay = float(np.max(np.abs(ours - clear)) / np.max(np.abs(clear)))
    ok = max(rels.values()) < 1e-4 and overlay < OVERLAY_TOLERANCE
    acceptance_line(7, "clear-channel limit", ok,
                    ", ".join(f"{k} {v:.0e}" for k, v in rels.items())
                    + f"; overlay gap {overlay:.2%} of peak")
    assert ok


def _centre_values(fid):
    (result,) = sweep.run_preset(sweep.figure_preset(fid))
    return [float(np.interp(0.0, pr.y, pr.values)) for pr in result.profiles]


def _series(fid):
    (result,) = sweep.run_preset(sweep.figure_preset(fid))
    assert not result.failures
    return [v for _, v in result.series]


def test_8_monotonic_figure_claims(acceptance_line):
    mono = sweep.is_strictly_monotone
    checks = {
        "F(0) down in R": mono(_centre_values("fig4"), False),
        "F(0) up in k": mono(_centre_values("fig6"), True),
        "F(0) up in e": mono(_centre_values("fig7"), True),
        "u(0) up in R": mono(_centre_values("fig9"), True),
        "critical down in R": all(mono(_series(f), False) for f in ("fig16a", "fig16b")),
        "critical down in alpha": all(mono(_series(f), False) for f in ("fig17a", "fig17b")),
    }
    plateau = True
    for fid in ("fig18a", "fig18b"):
        v = np.array(_series(fid))
        k = np.array(sweep.figure_preset(fid).specs[0].values)
        rise = v[k <= 1.0]
        tail = v[k >= 100.0]
        plateau &= bool(mono(rise, True) and np.all(np.diff(v) > -1e-12)
                        and (tail.max() - tail.min()) < 1e-3 * tail.mean()
                        and (rise[-1] - rise[0]) > 10 * (tail.max() - tail.min()))
    checks["critical rises then levels in k"] = plateau
    ok = all(checks.values())
    acceptance_line(8, "monotonic figure claims", ok,
                    ", ".join(f"{k}: {'ok' if v else 'NO'}" for k, v in checks.items()))
    assert ok


def test_9_cli_determinism(acceptance_line, tmp_path, capsys):
    runs = []
    for d in ("first", "second"):
        code = cli.main(["figure", "all", str(tmp_path / d)])
        runs.append(code)
    capsys.readouterr()
    first = sorted((tmp_path / "first").glob("*.csv"))
    same = bool(first) and all(
        io.strip_timestamp(p.read_text()) == io.strip_timestamp((tmp_path / "second" / p.name)
                                                                 .read_text())
        for p in first)
    verify_code = cli.main(["verify"])
    capsys.readouterr()
    ok = runs == [0, 0] and same and verify_code == 0
    acceptance_line(9, "CLI determinism and shipped verify", ok,
                    f"{len(first)} CSVs byte-identical: {same}, verify exit {verify_code}")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
