"""Command line entry point: validate, check, report, spectrum, integrate.

Exit codes: 0 everything passed, 1 a mathematical violation, 2 a usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import curvature, form_checks, hodge, torus
from .expr import ExprError
from .report import Report
from .structure import StructureError, default_box, load_file, sample_points, validate
from .tensor import TensorError

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2

SUITES = {
    "connection": lambda s, pts, tol, seed: curvature.identity_suite_connection(s, pts, tol),
    "ricci": lambda s, pts, tol, seed: curvature.ricci_suite(s, pts, tol),
    "metric": lambda s, pts, tol, seed: curvature.metric_weitzenbock_check(s, pts, tol),
    "bianchi": lambda s, pts, tol, seed: curvature.second_bianchi_check(s, pts, tol),
    "forms": lambda s, pts, tol, seed: form_checks.forms_suite(s, pts, tol, seed),
    "bw": lambda s, pts, tol, seed: form_checks.bochner_weitzenbock_suite(s, pts, tol, seed),
    "vector": lambda s, pts, tol, seed: form_checks.vector_field_suite(s, pts, tol, seed),
}

IDENTITIES = ("basic", "ros", "nabla2g", "ric-um", "lichnerowicz")


class UsageError(Exception):
    pass


def _parse_floats(text, count=None, what="value"):
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse {what} {text!r}") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"{what} needs {count} comma-separated numbers")
    return vals


def _parse_box(text, n):
    box = []
    for part in text.split(","):
        lo, sep, hi = part.partition(":")
        if not sep:
            raise UsageError("box entries look like lo:hi")
        box.append(tuple(_parse_floats(f"{lo},{hi}", 2, "box")))
    if len(box) != n:
        raise UsageError(f"box needs {n} intervals")
    return box


def _suite_names(values):
    names = []
    for v in values or ["all"]:
        for name in v.split(","):
            if name == "all":
                names.extend(SUITES)
            elif name in SUITES:
                names.append(name)
            else:
                raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    return list(dict.fromkeys(names))


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# -- commands ---------------------------------------------------------------------------

def cmd_validate(args):
    s = load_file(args.file)
    pts = sample_points(s, args.points, args.seed)
    rep = validate(s, pts)
    print(f"structure {s.name}: {rep.points} points, trace-free {rep.trace_free}, "
          f"Ricci symmetric {rep.ricci_symmetric}, equiaffine {rep.equiaffine}")
    for v in rep.violations:
        coords = ", ".join(f"{x:.6g}" for x in v.point)
        print(f"violation {v.check} at ({coords}): {v.detail}")
    print("valid" if rep.ok else "invalid")
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def cmd_check(args):
    s = load_file(args.file)
    names = _suite_names(args.suite)
    box = _parse_box(args.box, s.n) if args.box else default_box(s)
    vrep = validate(s)
    if not vrep.ok:
        for v in vrep.violations:
            print(f"violation {v.check} at {tuple(round(x, 6) for x in v.point)}: {v.detail}", file=sys.stderr)
        return EXIT_VIOLATION
    pts = sample_points(s, args.points, args.seed, box)
    start = time.perf_counter()
    report = Report(s.name, [], args.seed)
    for name in names:
        report.suites.append(SUITES[name](s, pts, args.tol, args.seed))
    report.wall_time = time.perf_counter() - start
    if args.json is not None:
        _emit(report.to_json(), args.json)
    if args.json != "-":
        print(report.format_text())
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _fmt(a):
    return np.array2string(np.asarray(a), precision=6, suppress_small=True, max_line_width=120)


def cmd_report(args):
    s = load_file(args.file)
    point = np.array(_parse_floats(args.at, s.n, "point"))
    geo = s.geometry(point[None, :])
    g = geo.g.value[0]
    np.linalg.cholesky(g)
    bundle = curvature.curvature_bundle(s, point)
    lines = [f"structure {s.name} at ({', '.join(f'{x:g}' for x in point)})",
             "g =", _fmt(g),
             "K[a,b,c] = K^c_ab =", _fmt(geo.K.value[0]),
             "E =", _fmt(geo.E.value[0]),
             "tau =", _fmt(geo.tau.value[0])]
    for kind in ("nabla", "bar", "hat"):
        lines += [f"Gamma_{kind}[a,b,c] = Gamma^c_ab =", _fmt(geo.gamma(kind).value[0])]
    lines += ["Ric =", _fmt(bundle.Ric.components), "Ric_bar =", _fmt(bundle.Ric_bar.components),
              "Ric_hat =", _fmt(bundle.Ric_hat.components),
              f"rho = {bundle.rho:.10g}", f"rho_bar = {bundle.rho_bar:.10g}", f"rho_hat = {bundle.rho_hat:.10g}"]
    eye = np.eye(s.n)
    for i in range(s.n):
        for j in range(i + 1, s.n):
            sec = curvature.sectional_nabla(s, point, eye[i], eye[j])
            lines.append(f"sectional nabla-curvature (e{i + 1}, e{j + 1}) = {sec:.10g}")
    op = curvature.curvature_operator(s, point)
    lines.append("curvature operator eigenvalues (R + R_bar) = " + _fmt(op.eigenvalues))
    print("\n".join(lines))
    return EXIT_OK


def cmd_spectrum(args):
    s = load_file(args.file)
    cx = hodge.build_complex(s, args.grid)
    degrees = args.degree if args.degree else [0, 1, 2]
    for k in degrees:
        if k not in (0, 1, 2):
            raise UsageError("degree must be 0, 1 or 2")
    for k in degrees:
        if cx.sizes[k] > hodge.MAX_UNKNOWNS:
            raise UsageError(f"{cx.sizes[k]} unknowns exceed the dense limit {hodge.MAX_UNKNOWNS}")
    if args.csv is not None:
        _emit(hodge.spectrum_csv(cx, degrees, args.count, args.method), args.csv)
    ok = True
    out = sys.stderr if args.csv == "-" else sys.stdout
    for k in degrees:
        if args.csv is None:
            vals = hodge.spectrum(cx, k, args.count, args.method)
            print(f"degree {k}: " + " ".join(f"{v:.10g}" for v in vals), file=out)
        hc = hodge.harmonic_dimension(cx, k, method=args.method)
        betti = hodge.TORUS_BETTI[k]
        match = hc.dimension == betti and hc.conclusive
        ok &= match
        flag = "" if hc.conclusive else " (inconclusive gap)"
        print(f"harmonic {k}-forms: {hc.dimension}, Betti number {betti}, "
              f"{'match' if match else 'MISMATCH'}{flag}", file=out)
    return EXIT_OK if ok else EXIT_VIOLATION


def _integrate_reports(s, args):
    wanted = IDENTITIES if args.identity == "all" else (args.identity,)
    reports = []
    for name in wanted:
        if name == "basic":
            X = args.field.split(",") if args.field else ["sin(v)", "cos(u)"][: s.n]
            if len(X) != s.n:
                raise UsageError(f"--field needs {s.n} components")
            reports.append(torus.integral_ric_check(s, X, args.grid))
        elif name == "ros":
            reports.append(torus.ros_integrals(s, None, args.grid, args.theta))
        elif name == "nabla2g":
            reports.append(torus.nabla2g_um_check(s, args.grid, args.theta))
        elif name == "ric-um":
            reports.append(torus.um_ricci_check(s, args.grid, args.theta))
        else:
            reports.append(hodge.lichnerowicz_check(s, args.hodge_grid, f=args.function, quad_N=args.grid))
    return reports


def cmd_integrate(args):
    s = load_file(args.file)
    if not s.is_periodic:
        raise UsageError("integration needs a period for every coordinate")
    start = time.perf_counter()
    report = Report(s.name, _integrate_reports(s, args), None)
    report.wall_time = time.perf_counter() - start
    if args.json is not None:
        _emit(report.to_json(), args.json)
    if args.json != "-":
        print(report.format_text())
    return EXIT_OK if report.passed else EXIT_VIOLATION


# -- parser -----------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="codazzi", description="Statistical structures: identity checks and spectra.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="pointwise validation of a structure file")
    v.add_argument("file")
    v.add_argument("--points", type=int, default=25)
    v.add_argument("--seed", type=int, default=42)
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("check", help="run identity suites at random points")
    c.add_argument("file")
    c.add_argument("--suite", action="append", help=f"{', '.join(SUITES)} or all (repeatable, comma lists)")
    c.add_argument("--points", type=int, default=10)
    c.add_argument("--seed", type=int, default=42)
    c.add_argument("--tol", type=float, default=None, help="override every tolerance")
    c.add_argument("--box", default=None, help="sampling box lo:hi,lo:hi")
    c.add_argument("--json", nargs="?", const="-", default=None, metavar="PATH",
                   help="write the JSON report to PATH (stdout when omitted)")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("report", help="print the derived objects at a point")
    r.add_argument("file")
    r.add_argument("--at", required=True, help="comma-separated coordinates")
    r.set_defaults(func=cmd_report)

    sp = sub.add_parser("spectrum", help="discrete Delta^nabla spectra on a periodic grid")
    sp.add_argument("file")
    sp.add_argument("--grid", type=int, default=16)
    sp.add_argument("--degree", type=int, action="append")
    sp.add_argument("--count", type=int, default=10)
    sp.add_argument("--method", choices=("auto", "jacobi", "lapack"), default="auto")
    sp.add_argument("--csv", nargs="?", const="-", default=None, metavar="PATH")
    sp.set_defaults(func=cmd_spectrum)

    i = sub.add_parser("integrate", help="integral formulas by quadrature on the torus")
    i.add_argument("file")
    i.add_argument("--grid", type=int, default=64)
    i.add_argument("--theta", type=int, default=64, help="fiber nodes for unit-bundle integrals")
    i.add_argument("--identity", choices=IDENTITIES + ("all",), default="all")
    i.add_argument("--field", default=None, help="vector field components for basic, comma-separated")
    i.add_argument("--function", default="sin(u)*cos(v)", help="test function for lichnerowicz")
    i.add_argument("--hodge-grid", type=int, default=24, help="grid of the discrete lambda_1")
    i.add_argument("--json", nargs="?", const="-", default=None, metavar="PATH")
    i.set_defaults(func=cmd_integrate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (UsageError, OSError, StructureError, ExprError, TensorError, ValueError, ArithmeticError,
            np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
