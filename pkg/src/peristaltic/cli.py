"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or parameter error,
3 numerical failure (resonance, degenerate geometry, ill-conditioned oracle).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__, core, io, sweep
from .oracle import OracleError
from .params import CONFIG_KEYS, FlowParameters, ParameterError, load_config, params_from_mapping

OUTDIR_ENV = "PERISTALTIC_OUTDIR"

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

EVAL_QUANTITIES = ("critical", "critical_displayed", "D", "beta", "coeffs",
                   "u", "F", "G", "f", "phi20_prime", "phi1")
AXIS_LABELS = {"F": "F(y)", "G": "G(y)", "mean_velocity": "mean axial velocity",
               "phi20_prime": "phi20'(y)", "phi1_re": "Re phi1(y)", "phi1_im": "Im phi1(y)",
               "D": "D", "critical_pressure": "critical reflux pressure"}


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _key_values(text: str) -> dict[str, float]:
    out = {}
    for item in text.split(","):
        if not item.strip():
            continue
        key, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected key=value, got {item!r}")
        try:
            out[key.strip()] = float(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{key.strip()} is not a number: {value!r}")
    return out


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("flow parameters (override --config)")
    g.add_argument("--config", type=Path, help="key = value parameter file")
    for key, attr in CONFIG_KEYS.items():
        g.add_argument(f"--{key}", type=float, dest=f"p_{key}", metavar="X",
                       help=attr.replace("_", " "))


def _params(args) -> FlowParameters:
    values = load_config(args.config) if getattr(args, "config", None) else {}
    for key in CONFIG_KEYS:
        v = getattr(args, f"p_{key}", None)
        if v is not None:
            values[key] = v
    return params_from_mapping(values)


def _outdir(args) -> Path:
    out = Path(args.outdir or os.environ.get(OUTDIR_ENV) or "out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _print_num(value) -> None:
    if isinstance(value, complex):
        print(f"{value.real!r} {value.imag:+.17g}j")
    else:
        print(repr(float(value)))


def cmd_eval(args) -> int:
    p = _params(args)
    q = args.quantity
    sol = core.solve_mean_flow(p)
    if q in ("critical", "critical_displayed"):
        _print_num(sol.critical_pressure("root" if q == "critical" else "displayed"))
        return EXIT_OK
    if q == "D":
        _print_num(sol.D)
        return EXIT_OK
    if q == "beta":
        _print_num(sol.coeffs.beta)
        return EXIT_OK
    if q == "coeffs":
        c = sol.coeffs
        for name in ("beta", "c11", "c12"):
            v = getattr(c, name)
            print(f"{name} {v.real!r} {v.imag:+.17g}j")
        return EXIT_OK
    ys = args.y if args.y else [0.0]
    evaluators = {
        "u": lambda y: sol.mean_velocity(None, y),
        "F": sol.F, "G": sol.G, "f": sol.f,
        "phi20_prime": lambda y: sol.phi20_prime(None, y),
        "phi1": sol.coeffs.phi1,
    }
    rows = []
    for y in ys:
        if abs(y) > 1:
            raise ParameterError([f"y must lie in [-1, 1] (got {y})"])
        v = complex(evaluators[q](y)) if q == "phi1" else float(evaluators[q](y))
        rows.append((y, v))
        if isinstance(v, complex):
            print(f"{y!r} {v.real!r} {v.imag:+.17g}j")
        else:
            print(f"{y!r} {v!r}")
    if args.csv:
        if q == "phi1":
            io.write_csv(args.csv, ("y", "re", "im"), ((y, v.real, v.imag) for y, v in rows),
                         p, {"quantity": q})
        else:
            io.write_csv(args.csv, ("y", "value"), rows, p, {"quantity": q})
    return EXIT_OK


def _write_results(fid: str, results: list[sweep.SweepResult], outdir: Path, meta: dict,
                   plot: bool = True) -> io.OutputBundle:
    bundle = io.OutputBundle(outdir, run_metadata={"version": __version__, **meta})
    curves = []
    xlabel = ylabel = ""
    for res in results:
        spec = res.spec
        ylabel = AXIS_LABELS.get(spec.quantity, spec.quantity)
        if spec.is_profile:
            xlabel = "y"
            for prof in res.profiles:
                name = f"{fid}_{io.safe_name(prof.label)}.csv"
                path = io.write_csv(outdir / name, ("y", "value"), prof.samples, prof.params,
                                    {**meta, "quantity": spec.quantity, "curve": prof.label})
                bundle.csv_paths.append(path)
                curves.append((prof.label, prof.y, prof.values))
        else:
            xlabel = spec.axis
            label = spec.label or f"{spec.quantity}_vs_{spec.axis}"
            name = f"{fid}_{io.safe_name(label)}.csv"
            path = io.write_csv(outdir / name, (spec.axis, "value"), res.series, spec.base,
                                {**meta, "quantity": spec.quantity, "axis": spec.axis,
                                 "curve": label})
            bundle.csv_paths.append(path)
            xs, vs = zip(*res.series)
            curves.append((label, xs, vs))
        for value, message in res.failures:
            print(f"warning: {fid} point {spec.axis}={value} failed: {message}", file=sys.stderr)
    if plot and curves:
        bundle.plot_paths.append(io.write_line_plot(outdir / f"{fid}.svg", curves, xlabel, ylabel,
                                                    meta.get("caption", "")))
    return bundle


def cmd_figure(args) -> int:
    if args.preset_file and args.id and not args.outdir:
        # "figure --preset-file P OUTDIR": the lone positional is the directory
        args.outdir, args.id = args.id, None
    outdir = _outdir(args)
    if args.preset_file:
        presets = [sweep.load_preset(args.preset_file)]
    elif args.id == "all":
        presets = [sweep.figure_preset(fid) for fid in sweep.preset_ids()]
    elif args.id:
        presets = [sweep.figure_preset(args.id)]
    else:
        raise ParameterError(["give a figure id, 'all', or --preset-file"])
    all_csv, all_plots = [], []
    for preset in presets:
        results = sweep.run_preset(preset, args.workers)
        meta = {"figure": preset.id, "caption": preset.caption,
                "approximate": str(preset.approximate).lower()}
        bundle = _write_results(preset.id, results, outdir, meta, plot=not args.no_plot)
        all_csv += bundle.csv_paths
        all_plots += bundle.plot_paths
        for path in bundle.csv_paths + bundle.plot_paths:
            print(path)
    manifest = io.OutputBundle(outdir, all_csv, all_plots,
                               run_metadata={"version": __version__,
                                             "figures": [p.id for p in presets]})
    manifest.write_manifest()
    return EXIT_OK


def cmd_sweep(args) -> int:
    base = _params(args)
    common = dict(y_samples=args.n, label=args.label or "")
    if args.values:
        spec = sweep.SweepSpec(base, args.axis, tuple(args.values), args.quantity, **common)
    elif args.range:
        lo, hi, count = args.range
        spec = sweep.SweepSpec.spaced(base, args.axis, lo, hi, int(count), args.quantity,
                                      "log" if args.log else "linear", **common)
    else:
        raise ParameterError(["sweep needs --values or --range"])
    outdir = _outdir(args)
    fid = args.name or "sweep"
    result = sweep.run_sweep(spec, args.workers)
    bundle = _write_results(fid, [result], outdir, {"sweep": fid}, plot=not args.no_plot)
    bundle.write_manifest()
    for path in bundle.csv_paths + bundle.plot_paths:
        print(path)
    return EXIT_OK


def cmd_profile(args) -> int:
    p = _params(args)
    prof = core.sample_profile(p, args.quantity, args.n, label=args.quantity)
    outdir = _outdir(args)
    name = args.name or f"profile_{args.quantity}"
    path = io.write_csv(outdir / f"{name}.csv", ("y", "value"), prof.samples, p,
                        {"quantity": args.quantity})
    print(path)
    if not args.no_plot:
        print(io.write_line_plot(outdir / f"{name}.svg", [(args.quantity, prof.y, prof.values)],
                                 "y", AXIS_LABELS.get(args.quantity, args.quantity)))
    return EXIT_OK


def cmd_verify(args) -> int:
    from . import verify

    extra = [params_from_mapping(kv) for kv in (args.params or [])]
    if args.seed is None:
        args.seed = verify.DEFAULT_SEED
    report = verify.run_verification(args.n, args.draws, args.seed, extra)
    text = report.table()
    print(text)
    if args.outdir or os.environ.get(OUTDIR_ENV):
        outdir = _outdir(args)
        bundle = io.OutputBundle(outdir, run_metadata={"version": __version__, "n": args.n,
                                                       "draws": args.draws, "seed": args.seed})
        bundle.report_path = outdir / "verify_report.txt"
        bundle.report_path.write_text(text + "\n")
        bundle.csv_paths.append(io.write_csv(outdir / "verify_residuals.csv",
                                             verify.DRAWS_COLUMNS, verify.draws_csv_rows(report),
                                             meta={"n": args.n, "seed": args.seed}))
        bundle.write_manifest()
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_presets(args) -> int:
    if args.show:
        print(sweep.figure_preset(args.show).dumps(), end="")
        return EXIT_OK
    if args.export:
        out = Path(args.export)
        out.mkdir(parents=True, exist_ok=True)
        for fid in sweep.preset_ids():
            print(sweep.export_preset(sweep.figure_preset(fid), out))
        return EXIT_OK
    for fid in sweep.preset_ids():
        preset = sweep.figure_preset(fid)
        flag = " [approximate]" if preset.approximate else ""
        print(f"{fid:8s} {preset.caption}{flag}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="peristaltic",
        description="Peristaltic flow in a porous channel with slip: closed-form "
                    "perturbation fields, oracle verification and figure sweeps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a scalar or point values")
    _add_param_flags(p)
    p.add_argument("--quantity", choices=EVAL_QUANTITIES, default="critical")
    p.add_argument("--y", type=_float_list, help="comma-separated y values in [-1, 1]")
    p.add_argument("--csv", type=Path)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("profile", help="sample a profile over [-1, 1] to CSV and SVG")
    _add_param_flags(p)
    p.add_argument("--quantity", choices=sweep.PROFILE_QUANTITIES, default="mean_velocity")
    p.add_argument("--n", type=int, default=201)
    p.add_argument("--name")
    p.add_argument("--outdir")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("sweep", help="one-parameter sweep")
    _add_param_flags(p)
    p.add_argument("--axis", choices=sweep.AXES, required=True)
    p.add_argument("--values", type=_float_list)
    p.add_argument("--range", type=float, nargs=3, metavar=("MIN", "MAX", "COUNT"))
    p.add_argument("--log", action="store_true", help="geometric spacing for --range")
    p.add_argument("--quantity", choices=sweep.PROFILE_QUANTITIES + sweep.SCALAR_QUANTITIES,
                   required=True)
    p.add_argument("--n", type=int, default=201, help="y samples per profile")
    p.add_argument("--name")
    p.add_argument("--label")
    p.add_argument("--outdir")
    p.add_argument("--workers", type=int)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="reproduce a figure scenario")
    p.add_argument("id", nargs="?", help="figure id (see 'presets') or 'all'")
    p.add_argument("outdir", nargs="?")
    p.add_argument("--preset-file", type=Path, help="run an exported (edited) preset")
    p.add_argument("--workers", type=int)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("verify", help="run the oracle verification suite")
    p.add_argument("--n", type=int, default=2001, help="oracle grid points")
    p.add_argument("--draws", type=int, default=20)
    p.add_argument("--seed", type=int, default=None, help="draw seed (default: shipped seed)")
    p.add_argument("--params", type=_key_values, action="append",
                   help="extra parameter set, e.g. R=15,alpha=0.25,e=0.9,k=0.001,s=0.0001")
    p.add_argument("--outdir")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("presets", help="list, show or export figure presets")
    p.add_argument("--show", metavar="ID")
    p.add_argument("--export", metavar="DIR")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParameterError, sweep.UnknownPresetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (core.ResonanceError, core.DegenerateGeometryError, OracleError,
            sweep.SweepError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
