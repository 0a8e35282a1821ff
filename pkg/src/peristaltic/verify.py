"""Self-verification suite run by ``peristaltic verify``.

Each check compares an analytic field against an independent route (the
finite-difference oracle, an identity, or a symmetry) at a fixed tolerance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import core, oracle
from .params import FlowParameters

#: critical reflux pressure quoted for R=15, alpha=0.25, e=0.9, k=1000, s=0.0001
CRITICAL_ANCHOR = 0.220966
ANCHOR_PARAMS = FlowParameters(15.0, 0.25, 0.9, 1000.0, 0.0001, 0.1)

DEFAULT_SEED = 20240601

DRAW_RANGES = {"R": (1.0, 30.0), "alpha": (0.1, 0.5), "e": (0.5, 1.0),
               "k": (0.05, 1.0e4), "s": (0.0, 0.01)}


@dataclass
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""


@dataclass
class DrawRecord:
    params: FlowParameters
    dp2: float
    residual_eq22: float
    residual_eq32: float
    oracle_phi1: float
    oracle_phi20: float


@dataclass
class VerificationReport:
    n_points: int
    checks: list[CheckResult] = field(default_factory=list)
    draws: list[DrawRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name, value, tolerance, detail="", passed=None):
        if passed is None:
            passed = bool(value < tolerance)
        self.checks.append(CheckResult(name, float(value), float(tolerance), passed, detail))

    def table(self) -> str:
        width = max(len(c.name) for c in self.checks)
        lines = [f"{'check':<{width}}  {'value':>11}  {'tolerance':>11}  status"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            line = f"{c.name:<{width}}  {c.value:11.3e}  {c.tolerance:11.3e}  {status}"
            if c.detail:
                line += f"  ({c.detail})"
            lines.append(line)
        for w in self.warnings:
            lines.append(f"warning: {w}")
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def random_draws(count: int, seed: int = DEFAULT_SEED) -> list[tuple[FlowParameters, float]]:
    """Parameter sets spanning the oracle ranges; k is drawn log-uniformly."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        lo, hi = DRAW_RANGES["k"]
        p = FlowParameters(
            reynolds_R=float(rng.uniform(*DRAW_RANGES["R"])),
            wave_number_alpha=float(rng.uniform(*DRAW_RANGES["alpha"])),
            porosity_e=float(rng.uniform(*DRAW_RANGES["e"])),
            darcy_k=float(10 ** rng.uniform(math.log10(lo), math.log10(hi))),
            slip_s=float(rng.uniform(*DRAW_RANGES["s"])),
            amplitude_ratio_eps=0.1,
        )
        out.append((p, float(rng.uniform(-3.0, 3.0))))
    return out


def _structure_errors(p: FlowParameters, dp2: float) -> dict[str, float]:
    y = np.linspace(0.0, 1.0, 41)
    sol = core.solve_mean_flow(p)
    c = sol.coeffs
    flipped = core.solve_mean_flow(p, c.with_flipped_branch())
    scale = lambda v: max(1.0, float(np.max(np.abs(v))))  # noqa: E731
    parity = max(
        float(np.max(np.abs(c.phi1(y) + c.phi1(-y)))) / scale(c.phi1(y)),
        *(float(np.max(np.abs(g(y) - g(-y)))) / scale(g(y)) for g in
          (sol.f, sol.G, sol.F, lambda t: sol.mean_velocity(dp2, t))),
    )
    realness = max(abs(sol.D_imag), float(np.max(np.abs(np.imag(sol.f_complex(y))))))
    branch = max(
        float(np.max(np.abs(flipped.coeffs.phi1(y) - c.phi1(y)))),
        abs(flipped.D - sol.D) / max(1.0, abs(sol.D)),
        float(np.max(np.abs(flipped.f(y) - sol.f(y)))) / scale(sol.f(y)),
        float(np.max(np.abs(flipped.mean_velocity(dp2, y) - sol.mean_velocity(dp2, y)))),
    )
    s = p.slip_s
    bc = max(abs(c.phi1(1.0) - 1), abs(c.phi1(-1.0) + 1),
             abs(c.phi1(1.0, 1) + s * c.phi1(1.0, 2)), abs(c.phi1(-1.0, 1) - s * c.phi1(-1.0, 2)))
    crit = sol.critical_pressure()
    root = abs(float(sol.mean_velocity(crit, 0.0)))
    return {"parity": parity, "realness": realness, "branch": branch, "bc": float(bc),
            "reflux_root": root}


def run_verification(n_points: int = 2001, draws: int = 20, seed: int = DEFAULT_SEED,
                     extra: list[FlowParameters] | None = None) -> VerificationReport:
    report = VerificationReport(n_points)
    grid = oracle.Grid1D.uniform(n_points)
    cases = random_draws(draws, seed) + [(p, p.dp2_mean) for p in (extra or [])]
    structure: dict[str, float] = {}
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", oracle.BoundaryLayerWarning)
        for p, dp2 in cases:
            sol = core.solve_mean_flow(p)
            c = sol.coeffs
            ys = oracle.chebyshev_points(50)
            norm = float(np.max(np.abs(c.phi1(ys))))
            r22 = oracle.residual_scan(c.phi1, "eq22", p) / norm
            r32 = oracle.residual_scan(lambda y, o: sol.phi20_prime(dp2, y, o), "eq32", p,
                                       dp2_mean=dp2)
            b1 = oracle.solve_phi1_bvp(p, grid)
            b2 = oracle.reconstruct_phi20_prime(p, dp2, grid, coeffs=c)
            d1 = b1.max_deviation(c.phi1)
            d2 = b2.max_deviation(lambda y: sol.phi20_prime(dp2, y))
            report.draws.append(DrawRecord(p, dp2, r22, r32, d1, d2))
            for key, value in _structure_errors(p, dp2).items():
                structure[key] = max(structure.get(key, 0.0), value)
    report.warnings.extend(str(w.message) for w in caught
                           if issubclass(w.category, oracle.BoundaryLayerWarning))

    worst = lambda attr: max(getattr(d, attr) for d in report.draws)  # noqa: E731
    ncase = f"{len(report.draws)} parameter sets"
    report.add("residual eq22 / |phi1|", worst("residual_eq22"), 1e-9, ncase)
    report.add("residual eq32", worst("residual_eq32"), 1e-8, ncase)
    report.add("oracle phi1 sup deviation", worst("oracle_phi1"), 1e-4, f"n={n_points}")
    report.add("oracle phi20' sup deviation", worst("oracle_phi20"), 1e-4, f"n={n_points}")
    report.add("parity", structure["parity"], 1e-12)
    report.add("realness of D and f", structure["realness"], 1e-12)
    report.add("branch invariance", structure["branch"], 1e-12)
    report.add("first-order wall conditions", structure["bc"], 1e-10)
    report.add("u_mean(0) at critical pressure", structure["reflux_root"], 1e-10)

    # observed order on the anchor case, grids n and ~n/2
    coarse = (n_points + 1) // 2
    c = core.first_order_coeffs(ANCHOR_PARAMS)
    e_fine = oracle.solve_phi1_bvp(ANCHOR_PARAMS, n_points).max_deviation(c.phi1)
    e_coarse = oracle.solve_phi1_bvp(ANCHOR_PARAMS, max(coarse, oracle.MIN_PHI1_POINTS))\
        .max_deviation(c.phi1)
    h_ratio = (max(coarse, oracle.MIN_PHI1_POINTS) - 1) / (n_points - 1)
    order = math.log(e_coarse / e_fine) / math.log(1.0 / h_ratio) if h_ratio < 1 else math.nan
    report.add("convergence order (phi1)", order, 0.3,
               f"err {e_coarse:.2e} -> {e_fine:.2e}", passed=bool(abs(order - 2.0) <= 0.3))

    crit = core.critical_reflux_pressure(ANCHOR_PARAMS)
    rel = abs(abs(crit) - CRITICAL_ANCHOR) / CRITICAL_ANCHOR
    report.add("critical pressure anchor (rel)", rel, 1e-3, f"value {crit:.6f}")
    return report


def draws_csv_rows(report: VerificationReport):
    for i, d in enumerate(report.draws):
        p = d.params
        yield (i, p.R, p.alpha, p.e, p.k, p.s, d.dp2, d.residual_eq22, d.residual_eq32,
               d.oracle_phi1, d.oracle_phi20)


DRAWS_COLUMNS = ("draw", "R", "alpha", "e", "k", "s", "dp2", "residual_eq22", "residual_eq32",
                 "oracle_phi1", "oracle_phi20")
