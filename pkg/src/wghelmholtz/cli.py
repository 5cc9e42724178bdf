"""
Command line driver ``wg-helmholtz``.

    wg-helmholtz convergence --case convex --k 1 --order 0 --levels 6 --out t1.csv
    wg-helmholtz scan --case pollution --kh 0.25,0.5 --kmax 100 --out scan.csv
    wg-helmholtz trace --case pollution --k 100 --n 60 --order 0 --out trace.csv

Options may also come from an INI file (``--config``) with keys named like
the long flags, in a ``[wg-helmholtz]`` section and/or a section named after
the subcommand.  Flags given on the command line win.

Exit codes: 0 success, 2 solver failure, 3 configuration error.
"""
import argparse
import configparser
import logging
import sys

from .assembly import SolveOptions, SolverError
from .harness import (ConfigError, ConvergenceRow, RunConfig, ScanRow, TracePoint,
                      format_table, run_convergence, run_pollution_scan,
                      run_resolution_sweep, solve_case, trace_plot_data, write_csv)
from .mesh import hexagon_mesh
from .problems import get_case

EXIT_OK, EXIT_SOLVER, EXIT_CONFIG = 0, 2, 3

# key -> (parser, default); shared by flags and the config file
_OPTIONS = {
    "case": (str, None),
    "order": (int, 0),
    "k": (None, None),
    "levels": (None, 6),
    "n0": (int, None),
    "kh": (None, "0.25"),
    "kmax": (float, None),
    "n": (None, None),
    "samples": (int, 400),
    "quad_degree": (int, None),
    "solver": (str, "direct"),
    "rtol": (float, 1e-10),
    "out": (str, None),
    "force": (None, False),
}

_DEFAULT_CASE = {"convergence": "convex", "scan": "pollution", "trace": "pollution"}


def _floats(text):
    return tuple(float(v) for v in str(text).replace(" ", "").split(",") if v)


def _ints(text):
    return tuple(int(v) for v in str(text).replace(" ", "").split(",") if v)


def _bool(text):
    if isinstance(text, bool):
        return text
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def build_parser():
    p = argparse.ArgumentParser(prog="wg-helmholtz",
                                description="Weak Galerkin Helmholtz benchmarks.")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="INI file with default option values")
        sp.add_argument("--case")
        sp.add_argument("--order", help="element order, 0 or 1")
        sp.add_argument("--quad-degree", dest="quad_degree",
                        help="triangle rule degree for data and projections (2, 5 or >= 8)")
        sp.add_argument("--solver", help="direct or bicgstab")
        sp.add_argument("--rtol", help="required relative residual")
        sp.add_argument("--out", help="output CSV path")

    c = sub.add_parser("convergence", help="error/order table over refinements")
    common(c)
    c.add_argument("--k", help="wave number")
    c.add_argument("--levels", help="number of levels, or a comma list of N (hexagon)")
    c.add_argument("--n0", help="initial hexagon N (default 2 for P0, 4 for P1)")

    s = sub.add_parser("scan", help="relative H1 error versus wave number at fixed kh")
    common(s)
    s.add_argument("--kh", help="comma list of kh targets")
    s.add_argument("--kmax", help="largest wave number of the default grid")
    s.add_argument("--k", help="comma list of wave numbers (overrides the grid)")
    s.add_argument("--n", help="comma list of N: sweep these meshes at fixed k instead")
    s.add_argument("--force", action="store_const", const=True, default=None,
                   help="allow meshes with k/kh above the guardrail")

    t = sub.add_parser("trace", help="real part of u_h and u along y = 0")
    common(t)
    t.add_argument("--k", help="wave number")
    t.add_argument("--n", help="hexagon N (h = 1/N)")
    t.add_argument("--samples", help="number of sample points")
    return p


def _read_config(path, command):
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"bad config {path}: {exc}") from None
    values = {}
    for section in ("wg-helmholtz", command):
        if cp.has_section(section):
            for key, val in cp.items(section):
                key = key.replace("-", "_")
                if key not in _OPTIONS:
                    raise ConfigError(f"unknown config key {key!r} in {path}")
                values[key] = val
    return values


def _merged(args):
    """Option values from defaults, then config file, then flags."""
    vals = {k: d for k, (_, d) in _OPTIONS.items()}
    if getattr(args, "config", None):
        vals.update(_read_config(args.config, args.command))
    for key in _OPTIONS:
        v = getattr(args, key, None)
        if v is not None:
            vals[key] = v
    if vals["case"] is None:
        vals["case"] = _DEFAULT_CASE[args.command]
    try:
        for key, (conv, _) in _OPTIONS.items():
            if conv is not None and vals[key] is not None:
                vals[key] = conv(vals[key])
        vals["force"] = _bool(vals["force"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return vals


def _run_config(vals, **extra):
    try:
        opts = SolveOptions(method=vals["solver"], rtol=vals["rtol"])
        return RunConfig(case=vals["case"], order=vals["order"], n0=vals["n0"],
                         quad_degree=vals["quad_degree"], solver=opts, out=vals["out"],
                         force=vals["force"], **extra)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _parse(fn, text, what):
    try:
        return fn(text)
    except ValueError:
        raise ConfigError(f"bad value for {what}: {text!r}") from None


def _cmd_convergence(vals):
    k = _parse(_floats, vals["k"], "k") if vals["k"] is not None else ()
    lv = str(vals["levels"])
    levels = _parse(_ints, lv, "levels") if "," in lv else _parse(int, lv, "levels")
    cfg = _run_config(vals, levels=levels, k_waves=k[:1])
    rows = run_convergence(cfg)
    return rows, ConvergenceRow


def _cmd_scan(vals):
    k = _parse(_floats, vals["k"], "k") if vals["k"] is not None else ()
    kh = _parse(_floats, vals["kh"], "kh")
    cfg = _run_config(vals, k_waves=k, kh_targets=kh, kmax=vals["kmax"])
    if vals["n"] is not None:
        return run_resolution_sweep(cfg, _parse(_ints, vals["n"], "n")), ScanRow
    return run_pollution_scan(cfg), ScanRow


def _cmd_trace(vals):
    if vals["k"] is None or vals["n"] is None:
        raise ConfigError("trace needs --k and --n")
    k = _parse(float, vals["k"], "k")
    N = _parse(int, vals["n"], "n")
    cfg = _run_config(vals, k_waves=(k,))
    if N < 1 or N > 2000:
        raise ConfigError("trace N must be between 1 and 2000")
    case = get_case(cfg.case, k_wave=k)
    if case.domain.kind == "hexagon":
        mesh = hexagon_mesh(N)
    else:
        mesh = case.initial_mesh()
    uh, _, _ = solve_case(case, mesh, cfg.order, cfg.quad(), cfg.solver)
    return trace_plot_data(uh, case, vals["samples"]), TracePoint


_COMMANDS = {"convergence": _cmd_convergence, "scan": _cmd_scan, "trace": _cmd_trace}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse usage errors count as configuration errors
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        vals = _merged(args)
        rows, row_type = _COMMANDS[args.command](vals)
    except ConfigError as exc:
        print(f"wg-helmholtz: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"wg-helmholtz: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    if vals["out"]:
        try:
            write_csv(rows, vals["out"], row_type)
        except OSError as exc:
            print(f"wg-helmholtz: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    if row_type is not TracePoint:
        print(format_table(rows))
    else:
        print(f"{len(rows)} trace samples")
    failures = getattr(rows, "failures", [])
    if failures:
        print(f"wg-helmholtz: {len(failures)} run(s) failed in the solver", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
