"""Command-line entry point: ``phaseint <subcommand> ...``.

stdout carries machine-readable results; failures print a single JSON error
record on stderr (exit 2 for usage errors, exit 1 for numerical failures).
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import budden as bd
from .config import FORMATS, load_config
from .contour import ContourPath, PhaseIntegrand, _phase_integral_tracked
from .errors import PhaseIntError
from .frobenius import build_series, evaluate_frobenius, indicial_roots
from .monodromy import circle_monodromy, eigenstructure, trace_relation_check
from .potential import LaurentPotential
from .stokes import (budden_loop_script, load_script, run_script, trace_equation,
                     trace_stokes_lines)


# ---------------------------------------------------------------------------
# deterministic JSON


def _num(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    return format(x + 0.0, ".17g")  # + 0.0 folds -0.0 into 0


def dumps(obj) -> str:
    """Compact JSON with floats at 17 significant digits; complex -> [re, im]."""
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([float(obj.real), float(obj.imag)])
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ",".join(f"{json.dumps(str(k))}:{dumps(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _parse_weights(text: str) -> tuple[complex, complex]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("weights must be 'A,B'")
    return parse_complex(parts[0]), parse_complex(parts[1])


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(dumps({"error": "usage", "message": message}) + "\n")
        sys.exit(2)


def _fail(kind: str, message: str, code: int) -> int:
    sys.stderr.write(dumps({"error": kind, "message": message}) + "\n")
    return code


# ---------------------------------------------------------------------------
# subcommands


def _potential(args, cfg) -> LaurentPotential:
    return LaurentPotential.parse(args.potential, tol_root=cfg.tol_root)


def cmd_frobenius(args, cfg, out):
    p = _potential(args, cfg)
    sol = build_series(p, args.order)
    y, dy = evaluate_frobenius(sol, args.weights, args.at, args.sheet)
    out.write(dumps({"f1": sol.f1, "f2": sol.f2, "K": sol.K, "y": y, "dy": dy}) + "\n")


def cmd_phase_integral(args, cfg, out):
    p = _potential(args, cfg)
    if args.path:
        with open(args.path) as fh:
            path = ContourPath.from_json(json.load(fh), side=args.side)
    elif args.start is not None and args.end is not None:
        path = ContourPath.line(args.start, args.end, side=args.side)
    else:
        raise ValueError("give --path FILE or both --from and --to")
    q = PhaseIntegrand(p) if args.seed is None else PhaseIntegrand.seeded(p, args.seed)
    total, w0, w1 = _phase_integral_tracked(q, path, cfg.tol_quad)
    val = path.orientation * total
    out.write(dumps({"integral": val, "exp_i_integral": cmath.exp(1j * val),
                     "sqrtQ_start": w0, "sqrtQ_end": w1}) + "\n")


def cmd_monodromy(args, cfg, out):
    p = _potential(args, cfg)
    radius = args.radius if args.radius is not None else (abs(args.base) if args.base else 0.5)
    m = circle_monodromy(p, radius, args.base, tol=min(cfg.tol_ode, 1e-12))
    f1, _ = indicial_roots(p.laurent_coefficient(-2))
    l1, l2, diag = eigenstructure(m, f1)
    out.write(dumps({
        "matrix": m.entries.tolist(),
        "trace": m.trace,
        "det": m.det,
        "eigenvalues": [l1, l2],
        "diagonalizable": diag,
        "f1_prediction": f1,
        "residual": trace_relation_check(m, f1),
    }) + "\n")


def cmd_stokes_diagram(args, cfg, out):
    p = _potential(args, cfg)
    origins = [args.origin] if args.origin is not None else \
        sorted(set(p.zeros), key=lambda z: (z.real, z.imag))
    kinds = tuple(k.strip() for k in args.kinds.split(","))
    rows = []
    line_id = 0
    for o in origins:
        for line in trace_stokes_lines(p, o, max_len=args.max_len, kinds=kinds,
                                       swap_naming=args.swap_naming):
            for z in line.points:
                rows.append((line_id, line.kind, float(z.real), float(z.imag)))
            line_id += 1
    target = open(args.out, "w", newline="") if args.out else out
    try:
        w = csv.writer(target, lineterminator="\n")
        w.writerow(["line_id", "kind", "re", "im"])
        for lid, kind, re, im in rows:
            w.writerow([lid, kind, _num(re), _num(im)])
    finally:
        if args.out:
            target.close()
            out.write(dumps({"lines": line_id, "points": len(rows), "out": args.out}) + "\n")


def cmd_connection(args, cfg, out):
    if args.script:
        script = load_script(args.script)
    elif args.preset == "budden":
        script = budden_loop_script()
    else:
        raise ValueError("give --script FILE or --preset budden")
    m = run_script(script)
    values = {}
    for item in args.set or []:
        name, _, val = item.partition("=")
        values[name] = parse_complex(val)
    if values:
        m = m.substitute(values)
    report = m.to_json()
    if args.f1 is not None:
        report["trace_equation"] = str(trace_equation(m, args.f1))
    out.write(dumps(report) + "\n")


def _budden_rows(args, cfg):
    methods = ["exact", "isolated", "numerical"] if args.method == "all" else [args.method]
    results = []
    for meth in methods:
        kw = {"radius": cfg.radius, "tol_ode": cfg.tol_ode} if meth == "numerical" else {}
        results.append(bd.scattering(args.c, meth, **kw))
    return results


def cmd_budden(args, cfg, out):
    if args.action == "sweep":
        lo = args.sweep_from if args.sweep_from is not None else 0.01
        hi = args.sweep_to if args.sweep_to is not None else 3.0
        rows = bd.comparison_sweep(lo, hi, args.n, numerical=args.numerical,
                                   radius=cfg.radius, tol_ode=cfg.tol_ode)
        target = open(args.out, "w", newline="") if args.out else out
        try:
            w = csv.writer(target, lineterminator="\n")
            w.writerow(["c", "A_exact", "A_isolated", "A_numerical"])
            for r in rows:
                w.writerow([_num(r["c"]), _num(r["A_exact"]), _num(r["A_isolated"]),
                            "" if r["A_numerical"] is None else _num(r["A_numerical"])])
        finally:
            if args.out:
                target.close()
                out.write(dumps({"rows": len(rows), "out": args.out}) + "\n")
        return
    if args.c is None:
        raise ValueError("budden needs --c (or the 'sweep' action)")
    results = _budden_rows(args, cfg)
    if cfg.format == "json":
        payload = [r.to_json() for r in results]
        out.write(dumps(payload[0] if len(payload) == 1 else payload) + "\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["c", "method", "A", "abs_R", "abs_T", "phase_known"])
        for r in results:
            w.writerow([_num(r.c), r.method, _num(r.A), _num(abs(r.R)), _num(abs(r.T)),
                        str(r.phase_known).lower()])


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (flags override it)")
    common.add_argument("--tol-quad", type=float)
    common.add_argument("--tol-ode", type=float)
    common.add_argument("--tol-root", type=float)
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("-v", "--verbose", action="count", default=None)

    parser = _Parser(prog="phaseint", description="Phase-integral analysis of y'' + Q(z) y = 0.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sp = sub.add_parser("frobenius", parents=[common], help="Frobenius solution at a point")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--order", type=int, default=64)
    sp.add_argument("--at", type=parse_complex, required=True)
    sp.add_argument("--weights", type=_parse_weights, default=(1, 0))
    sp.add_argument("--sheet", type=int, default=None)
    sp.set_defaults(func=cmd_frobenius)

    sp = sub.add_parser("phase-integral", parents=[common], help="integral of sqrt(Q) on a path")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--path", help="JSON path specification")
    sp.add_argument("--from", dest="start", type=parse_complex)
    sp.add_argument("--to", dest="end", type=parse_complex)
    sp.add_argument("--side", choices=("below", "above"))
    sp.add_argument("--seed", type=parse_complex, help="point where sqrt(Q) is principal")
    sp.set_defaults(func=cmd_phase_integral)

    sp = sub.add_parser("monodromy", parents=[common], help="numerical monodromy about 0")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--radius", type=float)
    sp.add_argument("--base", type=parse_complex)
    sp.add_argument("--report", choices=("json",), default="json")
    sp.set_defaults(func=cmd_monodromy)

    sp = sub.add_parser("stokes-diagram", parents=[common], help="trace Stokes lines")
    sp.add_argument("--potential", required=True)
    sp.add_argument("--from", dest="origin", type=parse_complex)
    sp.add_argument("--max-len", type=float, default=20.0)
    sp.add_argument("--kinds", default="stokes,anti_stokes")
    sp.add_argument("--swap-naming", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_stokes_diagram)

    sp = sub.add_parser("connection", parents=[common], help="compose a continuation script")
    sp.add_argument("--script")
    sp.add_argument("--preset", choices=("budden",))
    sp.add_argument("--f1", type=parse_complex)
    sp.add_argument("--set", action="append", metavar="NAME=VALUE")
    sp.set_defaults(func=cmd_connection)

    sp = sub.add_parser("budden", parents=[common], help="Budden scattering")
    sp.add_argument("action", nargs="?", choices=("sweep",))
    sp.add_argument("--c", type=float)
    sp.add_argument("--method", choices=("exact", "isolated", "numerical", "all"),
                    default="exact")
    sp.add_argument("--radius", type=float)
    sp.add_argument("--from", dest="sweep_from", type=float)
    sp.add_argument("--to", dest="sweep_to", type=float)
    sp.add_argument("--n", type=int, default=300)
    sp.add_argument("--numerical", action="store_true")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_budden)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return _fail("usage", "no subcommand given", 2)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return _fail("usage", "no subcommand given", 2)
    try:
        cfg = load_config(args.config, {
            "tol_quad": args.tol_quad, "tol_ode": args.tol_ode, "tol_root": args.tol_root,
            "format": args.format, "verbosity": args.verbose,
            "radius": getattr(args, "radius", None) if args.command == "budden" else None,
        })
    except (OSError, ValueError) as exc:
        return _fail("config", str(exc), 2)
    buf = io.StringIO()
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            args.func(args, cfg, buf)
        for w in caught:
            if cfg.verbosity > 0 or issubclass(w.category, RuntimeWarning):
                sys.stderr.write(dumps({"warning": w.category.__name__,
                                        "message": str(w.message)}) + "\n")
    except PhaseIntError as exc:
        return _fail(type(exc).__name__, str(exc), 1)
    except (ValueError, argparse.ArgumentTypeError) as exc:
        return _fail("usage", str(exc), 2)
    out.write(buf.getvalue())
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
